#include "hran/textio.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hran/errors.hpp"

namespace hran {

std::string fmt_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    (void)ec;
    return std::string(buf, ptr);
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw io_error("cannot write file: " + path);
        f << content;
        if (!f) throw io_error("write failed: " + path);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw io_error("cannot rename into place: " + path);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open file: " + path);
    std::ostringstream out;
    out << f.rdbuf();
    return out.str();
}

}  // namespace hran
