#include "nlkg/serialize.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace nlkg {

static_assert(std::endian::native == std::endian::little,
              "binary field format assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'N', 'L', 'K', 'G', 'F', 'L', 'D', '1'};

void write_block(std::ofstream& out, const Field& f) {
    out.write(kMagic, 8);
    const std::uint64_t n = static_cast<std::uint64_t>(f.grid.N);
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(f.v.data()), static_cast<std::streamsize>(8 * f.v.size()));
}

bool read_block(std::ifstream& in, const Grid& g, Field& f) {
    char magic[8];
    if (!in.read(magic, 8)) return false;
    if (std::memcmp(magic, kMagic, 8) != 0) throw ConfigError("field file: bad magic");
    std::uint64_t n = 0;
    if (!in.read(reinterpret_cast<char*>(&n), 8)) throw ConfigError("field file: truncated header");
    if (n != static_cast<std::uint64_t>(g.N)) throw ConfigError("field file: sample count does not match grid");
    f = Field(g);
    if (!in.read(reinterpret_cast<char*>(f.v.data()), static_cast<std::streamsize>(8 * n)))
        throw ConfigError("field file: truncated data");
    return true;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

void write_field_csv(const Field& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for write: " + path);
    out << "x,value\n";
    for (int i = 0; i < f.size(); ++i) out << fmt(f.grid.x(i)) << ',' << fmt(f[i]) << '\n';
}

void write_field_binary(const Field& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for write: " + path);
    write_block(out, f);
}

Field read_field_binary(const Grid& g, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open: " + path);
    Field f;
    if (!read_block(in, g, f)) throw ConfigError("field file: empty: " + path);
    return f;
}

void write_state_csv(const State& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for write: " + path);
    out << "x,first,second\n";
    for (int i = 0; i < s.first.size(); ++i)
        out << fmt(s.grid().x(i)) << ',' << fmt(s.first[i]) << ',' << fmt(s.second[i]) << '\n';
}

void write_state_binary(const State& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for write: " + path);
    write_block(out, s.first);
    write_block(out, s.second);
}

State read_state_binary(const Grid& g, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open: " + path);
    State s(g);
    if (!read_block(in, g, s.first)) throw ConfigError("state file: empty: " + path);
    if (!read_block(in, g, s.second)) s.second = Field(g);
    return s;
}

State read_state_csv(const Grid& g, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open: " + path);
    std::string line;
    std::getline(in, line);  // header
    State s(g);
    int i = 0;
    while (std::getline(in, line) && i < g.N) {
        std::istringstream row(line);
        std::string cell;
        std::vector<double> cols;
        while (std::getline(row, cell, ',')) cols.push_back(std::stod(cell));
        if (cols.size() < 2) throw ConfigError("state csv: need at least 2 columns");
        s.first[i] = cols[1];
        s.second[i] = cols.size() > 2 ? cols[2] : 0.0;
        ++i;
    }
    if (i != g.N) throw ConfigError("state csv: row count does not match grid");
    return s;
}

State read_state(const Grid& g, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open: " + path);
    char magic[8] = {};
    in.read(magic, 8);
    in.close();
    if (std::memcmp(magic, kMagic, 8) == 0) return read_state_binary(g, path);
    return read_state_csv(g, path);
}

}  // namespace nlkg
