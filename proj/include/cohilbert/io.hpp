// Deterministic serialization helpers: numbers are printed with 17
// significant digits so repeated runs produce byte-identical files, and
// writers fail loudly (IoError) instead of leaving partial output.
#ifndef COHILBERT_IO_HPP
#define COHILBERT_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

namespace cohilbert {

class IoError : public std::runtime_error {
  public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void require_directory(const std::string& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec))
        throw IoError("output directory does not exist: " + dir);
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace cohilbert

#endif  // COHILBERT_IO_HPP
