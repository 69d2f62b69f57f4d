#pragma once

// Shared helpers for the test binaries: scratch directories, subprocess
// capture and the paths wired in from the build.

#include <filesystem>
#include <string>

namespace testsupport {

struct CmdResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Runs a shell command, capturing stdout and stderr separately.
CmdResult run_command(const std::string& cmd);

// Self-deleting scratch directory under the system temp root.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

void write_file(const std::filesystem::path& p, const std::string& content);
std::string slurp(const std::filesystem::path& p);

// Directory holding the built binaries (all targets share one).
std::filesystem::path bin_dir();
// The repo's shipped configs directory.
std::filesystem::path configs_dir();

}  // namespace testsupport
