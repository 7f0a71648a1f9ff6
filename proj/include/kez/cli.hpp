#pragma once

// ke-zeta command line:
//   ke-zeta <zeta|stability|mc|sample|oracle|verify> [op] [flags] [--config file.json] [--out dir]
//
// Parameter precedence: built-in defaults < config file < flags. Results are
// printed as a JSON manifest; with --out, the manifest is appended to
// <dir>/manifest.jsonl and CSV payloads are written next to it. Nothing is
// written when the command fails.

#include <iosfwd>
#include <string>
#include <vector>

namespace kez {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int internal = 1;
inline constexpr int validation = 2;
inline constexpr int stability = 3;
inline constexpr int convergence = 4;
inline constexpr int mismatch = 5;  // oracle mismatch or failed verify gate
}  // namespace exit_code

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr const char* kManifestSchema = "ke-zeta.manifest/1";

struct DispatchEntry {
    std::string command;
    std::string op;
    std::string summary;
    // library operations this entry calls
    std::vector<std::string> covers;
    // runnable examples (arguments after the program name, small budgets)
    std::vector<std::vector<std::string>> examples;
};

const std::vector<DispatchEntry>& dispatch_table();

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kez
