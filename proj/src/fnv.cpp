#include "fundcast/fnv.hpp"

#include <fstream>
#include <sstream>

#include "fundcast/errors.hpp"

namespace fundcast {

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

std::uint64_t fingerprint_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file for fingerprint: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a64(ss.str());
}

}  // namespace fundcast
