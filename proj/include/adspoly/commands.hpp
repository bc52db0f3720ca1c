// Subcommand implementations shared by the command-line tool.
#pragma once

#include "adspoly/core.hpp"
#include "adspoly/io.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace adspoly::cli {

using io::ordered_json;

struct Options {
    std::string q_file;
    std::vector<std::string> polygon_files;
    std::string samples_dir = "samples";
    int grid_size = 0;  // 0: command default
    double grid_radius = 0;
    double tol = 1e-10;
    double ray_tmax = 30;
    int offset = -1;  // mlmap: -1 runs every offset
    std::string out = "out";
    std::uint64_t seed = 1;
};

// Stage timings and artifact names, collected for the manifest.
struct Run {
    std::string command;
    ordered_json config;
    std::map<std::string, double> timings;
    std::vector<std::string> outputs;
    detail::Stopwatch clock;

    void lap(const std::string& stage) { timings[stage] += clock.lap(); }
};

ordered_json base_config(const Options& o, const std::string& cmd);
void write_manifest(const Options& o, const Run& r, int exit_code);

int cmd_solve(const Options& o, Run& r);
int cmd_polygon(const Options& o, Run& r);
int cmd_invert(const Options& o, Run& r);
int cmd_mlmap(const Options& o, Run& r);
int cmd_horo(const Options& o, Run& r);
int cmd_check(const Options& o, Run& r);

}  // namespace adspoly::cli
