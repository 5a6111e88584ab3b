#pragma once

#include <filesystem>
#include <random>
#include <string>

#ifndef TRIAD_TESTDATA_DIR
#define TRIAD_TESTDATA_DIR "testdata"
#endif

namespace triad::test {

inline std::filesystem::path testdata(const std::string& rel = "") {
    std::filesystem::path base(TRIAD_TESTDATA_DIR);
    return rel.empty() ? base : base / rel;
}

/// Fresh directory under the build tree's temp area; removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path() / "triad-tests";
        std::filesystem::create_directories(base);
        static std::mt19937_64 rng{std::random_device{}()};
        path_ = base / (tag + "-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace triad::test
