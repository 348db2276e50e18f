#ifndef CHEEGERKIT_SCENE_HPP
#define CHEEGERKIT_SCENE_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "container.hpp"
#include "domain.hpp"
#include "errors.hpp"
#include "graph_function.hpp"

namespace cheegerkit {

using Json = nlohmann::json;

struct SweepSpec {
    std::string param;
    std::vector<double> values;
};

/// Parsed scene document. `source` keeps the validated JSON for digests and
/// for rebuilding φ with one parameter replaced.
struct Scene {
    Json source;
    Container container = Container::cone(0.0, 1.0);
    std::optional<GraphFunction> phi;
    std::optional<double> radius; ///< cone scenes: Ω = C ∩ B_R
    double delta = 1.0 / 64;
    double mesh_h = 1.0 / 32;
    std::optional<SweepSpec> sweep;
    std::string output = "out";

    SubgraphDomain subgraph() const {
        require(phi.has_value(), ErrorKind::unsupported_domain, "scene has no graph function (cone scene?)");
        return build_subgraph_domain(container, *phi);
    }
    SectorDomain sector() const {
        require(!container.is_cylinder() && radius, ErrorKind::unsupported_domain, "scene is not a cone sector");
        return SectorDomain(container, *radius);
    }
};

namespace detail {

inline void only_keys(const Json &obj, std::initializer_list<const char *> allowed, const std::string &where) {
    require(obj.is_object(), ErrorKind::parse, where + " must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto &[k, v] : obj.items())
        require(ok.count(k) > 0, ErrorKind::parse, "unknown key '" + k + "' in " + where);
}

inline const Json &need(const Json &obj, const char *key, const std::string &where) {
    require(obj.contains(key), ErrorKind::parse, "missing key '" + std::string(key) + "' in " + where);
    return obj.at(key);
}

inline double number(const Json &v, const std::string &what) {
    require(v.is_number(), ErrorKind::parse, what + " must be a number");
    double x = v.get<double>();
    require(std::isfinite(x), ErrorKind::parse, what + " must be finite");
    return x;
}

inline double number_or(const Json &obj, const char *key, double fallback, const std::string &where) {
    return obj.contains(key) ? number(obj.at(key), where + "." + key) : fallback;
}

inline CrossSection parse_cross_section(const Json &j, double spacing) {
    const std::string where = "container.cross_section";
    require(j.is_object(), ErrorKind::parse, where + " must be an object");
    const std::string kind = need(j, "kind", where).get<std::string>();
    if (kind == "interval") {
        only_keys(j, {"kind", "lo", "hi"}, where);
        return CrossSection::interval(number_or(j, "lo", 0.0, where), number(need(j, "hi", where), where + ".hi"),
                                      spacing);
    }
    if (kind == "polygon") {
        only_keys(j, {"kind", "vertices"}, where);
        const Json &vs = need(j, "vertices", where);
        require(vs.is_array(), ErrorKind::parse, where + ".vertices must be an array");
        std::vector<Point2> pts;
        for (const auto &p : vs) {
            require(p.is_array() && p.size() == 2, ErrorKind::parse, "polygon vertices are [x, y] pairs");
            pts.push_back({number(p[0], "vertex x"), number(p[1], "vertex y")});
        }
        return CrossSection::polygon(std::move(pts), spacing);
    }
    fail(ErrorKind::parse, "unknown cross-section kind '" + kind + "'");
}

inline Family parse_family(const std::string &name, const Json &params) {
    const std::string where = "phi.params";
    if (name == "constant") {
        only_keys(params, {"h"}, where);
        return Family::constant(number(need(params, "h", where), "phi.params.h"));
    }
    if (name == "affine") {
        only_keys(params, {"a", "b"}, where);
        const Json &a = need(params, "a", where);
        double b = number(need(params, "b", where), "phi.params.b");
        if (a.is_array()) {
            require(a.size() == 2, ErrorKind::parse, "phi.params.a must be a number or a pair");
            return Family::affine({number(a[0], "phi.params.a[0]"), number(a[1], "phi.params.a[1]")}, b);
        }
        return Family::affine(number(a, "phi.params.a"), b);
    }
    if (name == "cosine") {
        only_keys(params, {"a", "b", "k"}, where);
        return Family::cosine(number(need(params, "b", where), "phi.params.b"),
                              number(need(params, "a", where), "phi.params.a"), number_or(params, "k", 1.0, where));
    }
    fail(ErrorKind::parse, "unknown phi family '" + name + "'");
}

} // namespace detail

/// Builds φ from a scene "phi" object on the given cross-section.
inline GraphFunction parse_phi(const Json &j, const CrossSection &cs) {
    require(j.is_object(), ErrorKind::parse, "phi must be an object");
    if (j.contains("samples")) {
        detail::only_keys(j, {"samples"}, "phi");
        const Json &s = j.at("samples");
        require(s.is_array(), ErrorKind::parse, "phi.samples must be an array");
        std::vector<double> v;
        for (const auto &x : s) v.push_back(detail::number(x, "phi sample"));
        return GraphFunction::from_samples(cs, std::move(v));
    }
    detail::only_keys(j, {"family", "params"}, "phi");
    const Json &fam = detail::need(j, "family", "phi");
    require(fam.is_string(), ErrorKind::parse, "phi.family must be a string");
    Json params = j.contains("params") ? j.at("params") : Json::object();
    return GraphFunction::from_family(cs, detail::parse_family(fam.get<std::string>(), params));
}

inline Scene parse_scene(const Json &j) {
    detail::only_keys(j, {"container", "phi", "domain", "grid", "mesh", "sweep", "output"}, "scene");
    Scene s;
    s.source = j;
    const Json &c = detail::need(j, "container", "scene");
    require(c.is_object(), ErrorKind::parse, "container must be an object");
    const std::string kind = detail::need(c, "kind", "container").get<std::string>();
    if (kind == "cylinder") {
        detail::only_keys(c, {"kind", "cross_section", "spacing"}, "container");
        double spacing = detail::number(detail::need(c, "spacing", "container"), "container.spacing");
        s.container = Container::cylinder(detail::parse_cross_section(detail::need(c, "cross_section", "container"), spacing));
        s.phi = parse_phi(detail::need(j, "phi", "scene"), s.container.cross_section());
        require(!j.contains("domain"), ErrorKind::parse, "domain.radius applies to cone scenes only");
    } else if (kind == "cone") {
        detail::only_keys(c, {"kind", "theta1", "theta2"}, "container");
        s.container = Container::cone(detail::number(detail::need(c, "theta1", "container"), "container.theta1"),
                                      detail::number(detail::need(c, "theta2", "container"), "container.theta2"));
        require(!j.contains("phi"), ErrorKind::parse, "cone scenes take domain.radius, not phi");
        const Json &d = detail::need(j, "domain", "scene");
        detail::only_keys(d, {"radius"}, "domain");
        s.radius = detail::number(detail::need(d, "radius", "domain"), "domain.radius");
    } else {
        fail(ErrorKind::parse, "unknown container kind '" + kind + "'");
    }
    if (j.contains("grid")) {
        detail::only_keys(j.at("grid"), {"delta"}, "grid");
        s.delta = detail::number_or(j.at("grid"), "delta", s.delta, "grid");
    }
    if (j.contains("mesh")) {
        detail::only_keys(j.at("mesh"), {"h"}, "mesh");
        s.mesh_h = detail::number_or(j.at("mesh"), "h", s.mesh_h, "mesh");
    }
    if (j.contains("sweep")) {
        const Json &w = j.at("sweep");
        detail::only_keys(w, {"param", "values"}, "sweep");
        SweepSpec sw;
        sw.param = detail::need(w, "param", "sweep").get<std::string>();
        const Json &vals = detail::need(w, "values", "sweep");
        require(vals.is_array(), ErrorKind::parse, "sweep.values must be an array");
        for (const auto &v : vals) sw.values.push_back(detail::number(v, "sweep value"));
        s.sweep = std::move(sw);
    }
    if (j.contains("output")) {
        require(j.at("output").is_string(), ErrorKind::parse, "output must be a string");
        s.output = j.at("output").get<std::string>();
    }
    return s;
}

/// Parses scene text; syntax errors carry the line and column.
inline Scene parse_scene_text(const std::string &text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error &e) {
        // e.byte is 1-based; recount lines so the message does not depend on the library wording
        std::size_t line = 1, col = 1;
        for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
            if (text[k] == '\n') ++line, col = 1;
            else ++col;
        }
        fail(ErrorKind::parse, "malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col));
    }
    try {
        return parse_scene(j);
    } catch (const Json::exception &e) {
        fail(ErrorKind::parse, std::string("bad scene value: ") + e.what());
    }
}

inline Scene load_scene(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorKind::parse, "cannot read scene file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scene_text(ss.str());
}

/// Copy of the scene JSON with phi.params[param] (or a top-level grid/mesh
/// size) replaced, for sweeps.
inline Scene with_parameter(const Scene &base, const std::string &param, double value) {
    Json j = base.source;
    j.erase("sweep");
    if (param == "delta") j["grid"]["delta"] = value;
    else if (param == "mesh_h") j["mesh"]["h"] = value;
    else if (param == "radius") j["domain"]["radius"] = value;
    else {
        require(j.contains("phi") && j["phi"].contains("family"), ErrorKind::parse,
                "sweep parameter '" + param + "' needs a phi family");
        j["phi"]["params"][param] = value;
    }
    return parse_scene(j);
}

/// FNV-1a of the canonical (sorted-key, compact) JSON text.
inline std::string digest(const Json &j) {
    const std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace cheegerkit

#endif
