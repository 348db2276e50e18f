#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cheegerkit/commands.hpp"

namespace fs = std::filesystem;
using namespace cheegerkit;

namespace {

void write_file(const fs::path &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorKind::parse, "cannot write " + path.string());
    out << content;
}

std::vector<double> parse_resolutions(const std::string &text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char *end = nullptr;
        double v = std::strtod(item.c_str(), &end);
        require(!item.empty() && *end == '\0' && v > 0 && std::isfinite(v), ErrorKind::parse,
                "--resolutions expects positive numbers separated by commas, got '" + item + "'");
        out.push_back(v);
    }
    require(!out.empty(), ErrorKind::parse, "--resolutions is empty");
    return out;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Relative Cheeger sets and overdetermined torsion in cylinders and cones"};
    app.require_subcommand(1, 1);
    std::string scene_path, out_dir, resolutions;
    bool oracle = false, quiet = false;
    for (const auto &name : command_names()) {
        auto *sub = app.add_subcommand(name);
        sub->add_option("--scene", scene_path, "scene JSON file")->required();
        sub->add_option("--out", out_dir, "output directory (default: the scene's \"output\")");
        sub->add_flag("--oracle", oracle, "exhaustive Cheeger search (at most 22 cells)");
        sub->add_option("--resolutions", resolutions, "audit mesh sizes, e.g. 0.125,0.0625");
        sub->add_flag("--quiet", quiet, "no summary on stdout");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    const std::string op = app.get_subcommands().front()->get_name();

    try {
        Scene scene = load_scene(scene_path);
        CommandOptions opt;
        opt.oracle = oracle;
        if (!resolutions.empty()) opt.resolutions = parse_resolutions(resolutions);
        CommandResult r = run_command(op, scene, opt);

        fs::path dir = out_dir.empty() ? fs::path(scene.output) : fs::path(out_dir);
        fs::create_directories(dir);
        std::string result_file = op + ".json";
        write_file(dir / result_file, r.document.dump(2) + "\n");
        for (const auto &a : r.artifacts) write_file(dir / a.name, a.content);
        write_file(dir / "manifest.json", manifest(r, result_file).dump(2) + "\n");
        if (!quiet) std::cout << r.document["values"].dump(2) << "\n";
        return 0;
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_solver_failure(e.kind()) ? 3 : 2;
    } catch (const fs::filesystem_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
