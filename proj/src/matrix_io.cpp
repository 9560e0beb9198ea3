#include "nearcommute/matrix_io.hpp"

#include "nearcommute/errors.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace nearcommute {

namespace {

double parse_double(const std::string& token) {
    double v = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    // from_chars rejects a leading '+', which some writers emit.
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw InvalidInput("MTXC: cannot parse number '" + token + "'");
    }
    return v;
}

} // namespace

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                   std::chars_format::general, 17);
    if (ec != std::errc()) throw NumericalError("format_double: conversion failed");
    return std::string(buf.data(), ptr);
}

Matrix read_mtxc(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("MTXC: empty input");
    std::istringstream header(line);
    std::string magic;
    int version = 0;
    long long n = 0;
    if (!(header >> magic >> version >> n) || magic != "MTXC" || version != 1) {
        throw InvalidInput("MTXC: bad header '" + line + "'");
    }
    if (n <= 0) throw InvalidInput("MTXC: dimension must be positive");
    std::string extra;
    if (header >> extra) throw InvalidInput("MTXC: trailing data in header");

    Matrix m(n, n);
    for (long long r = 0; r < n; ++r) {
        if (!std::getline(in, line)) throw InvalidInput("MTXC: missing row " + std::to_string(r));
        std::istringstream row(line);
        std::string re_tok, im_tok;
        for (long long c = 0; c < n; ++c) {
            if (!(row >> re_tok >> im_tok)) {
                throw InvalidInput("MTXC: row " + std::to_string(r) + " has too few values");
            }
            m(r, c) = Complex(parse_double(re_tok), parse_double(im_tok));
        }
        if (row >> extra) {
            throw InvalidInput("MTXC: row " + std::to_string(r) + " has too many values");
        }
    }
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            throw InvalidInput("MTXC: unexpected data after last row");
        }
    }
    if (!m.allFinite()) throw InvalidInput("MTXC: non-finite entries");
    return m;
}

Matrix read_mtxc_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open '" + path + "'");
    return read_mtxc(in);
}

void write_mtxc(std::ostream& out, const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0) throw InvalidInput("MTXC: matrix must be square");
    out << "MTXC 1 " << m.rows() << '\n';
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            if (c) out << ' ';
            out << format_double(m(r, c).real()) << ' ' << format_double(m(r, c).imag());
        }
        out << '\n';
    }
}

void write_mtxc_file(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write_mtxc(out, m);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace nearcommute
