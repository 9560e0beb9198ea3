#pragma once

// "MTXC 1" text format:
//
//   MTXC 1 <n>
//   re00 im00 re01 im01 ... (2n values)
//   ... (n rows)
//
// Values are written with 17 significant digits so a read/write cycle is exact.

#include "nearcommute/linalg.hpp"

#include <iosfwd>
#include <string>

namespace nearcommute {

Matrix read_mtxc(std::istream& in);
Matrix read_mtxc_file(const std::string& path);

void write_mtxc(std::ostream& out, const Matrix& m);
void write_mtxc_file(const std::string& path, const Matrix& m);

// 17 significant digits, general notation.
std::string format_double(double v);

} // namespace nearcommute
