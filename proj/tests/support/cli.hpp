#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "support/paths.hpp"

#ifndef TRIAD_CLI_PATH
#define TRIAD_CLI_PATH "triad"
#endif

namespace triad::test {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Run the installed CLI with `args`, capturing stdout/stderr separately.
inline CliResult run_cli(const std::string& args) {
    TempDir tmp("cli-io");
    const auto out_path = tmp.file("out.txt");
    const auto err_path = tmp.file("err.txt");
    const std::string cmd = std::string(TRIAD_CLI_PATH) + " " + args + " 1>" +
                            out_path.string() + " 2>" + err_path.string();
    int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(out_path);
    r.err = read_file(err_path);
    return r;
}

}  // namespace triad::test
