// Command-line front end: solve, polygon, invert, mlmap, horo, check.
#include "adspoly/adspoly.hpp"
#include "adspoly/commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

using namespace adspoly;
using namespace adspoly::cli;
namespace fs = std::filesystem;

int main(int argc, char** argv) {
    CLI::App app{"Polynomial maximal surfaces in AdS3 and their light-like polygons"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* s) {
        s->add_option("--grid-size", o.grid_size, "grid nodes per side (odd)");
        s->add_option("--grid-radius", o.grid_radius, "half-width of the square grid; 0 picks a default");
        s->add_option("--tol", o.tol, "Newton residual tolerance");
        s->add_option("--ray-tmax", o.ray_tmax, "cap on natural length along limit rays");
        s->add_option("--out", o.out, "output directory");
    };
    auto* solve_c = app.add_subcommand("solve", "solve the vortex equation; grid, surface samples, diagnostics");
    solve_c->add_option("--q", o.q_file, "differential JSON")->required();
    common(solve_c);
    auto* poly_c = app.add_subcommand("polygon", "boundary light-like polygon of a differential");
    poly_c->add_option("--q", o.q_file, "differential JSON")->required();
    common(poly_c);
    auto* inv_c = app.add_subcommand("invert", "recover a differential from a polygon");
    inv_c->add_option("--polygon", o.polygon_files, "polygon JSON (or P then Q files)")->required();
    inv_c->add_option("--offset", o.offset, "shift of the Q marking");
    inv_c->add_option("--seed", o.seed, "optimizer seed");
    common(inv_c);
    auto* ml_c = app.add_subcommand("mlmap", "minimal Lagrangian maps between two ideal polygons");
    ml_c->add_option("--polygon", o.polygon_files, "P and Q files, or one file with both")->required();
    ml_c->add_option("--offset", o.offset, "single offset; default runs all");
    ml_c->add_option("--seed", o.seed, "optimizer seed");
    common(ml_c);
    auto* horo_c = app.add_subcommand("horo", "closed-form horospherical reference data");
    horo_c->add_option("--out", o.out, "output directory");
    auto* check_c = app.add_subcommand("check", "invariant suite over the sample differentials");
    check_c->add_option("--samples", o.samples_dir, "directory of differential JSON files");
    common(check_c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    Run r;
    r.command = sub->get_name();
    r.config = base_config(o, r.command);
    int code = 0;
    try {
        fs::create_directories(o.out);
        if (sub == solve_c) code = cmd_solve(o, r);
        else if (sub == poly_c) code = cmd_polygon(o, r);
        else if (sub == inv_c) code = cmd_invert(o, r);
        else if (sub == ml_c) code = cmd_mlmap(o, r);
        else if (sub == horo_c) code = cmd_horo(o, r);
        else code = cmd_check(o, r);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        code = e.stage() == "io" ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        code = 2;
    }
    try {
        if (fs::is_directory(o.out)) write_manifest(o, r, code);
    } catch (const std::exception& e) {
        std::cerr << "error: manifest: " << e.what() << "\n";
        if (code == 0) code = 2;
    }
    return code;
}
