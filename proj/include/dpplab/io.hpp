#ifndef DPPLAB_IO_HPP
#define DPPLAB_IO_HPP

#include <string>

#include "dpplab/kernel.hpp"
#include "dpplab/sampler.hpp"

namespace dpp {

// Matrix files: CSV is d rows x d columns of plain decimals without a
// header; JSON is {"d": n, "entries": [[...]]}. Doubles are written with 17
// significant digits so read(write(M)) reproduces M bit-exactly.
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const Matrix& M, const std::string& path);
Matrix read_matrix_json(const std::string& path);
void write_matrix_json(const Matrix& M, const std::string& path);
Matrix read_matrix_auto(const std::string& path);  // dispatch on extension

std::string format_double(double x);  // %.17g

// Sample files: CSV has one observation per row, d columns of 0/1, with an
// optional "x1,...,xd" header. The binary form is row-major bit-packed rows
// behind a 16-byte header (magic "DPPS", u32 version, u32 T, u32 d).
SampleMatrix read_samples_csv(const std::string& path);
void write_samples_csv(const SampleMatrix& X, const std::string& path, bool header = true);
SampleMatrix read_samples_bin(const std::string& path);
void write_samples_bin(const SampleMatrix& X, const std::string& path);
SampleMatrix read_samples_auto(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace dpp

#endif
