#pragma once

// Text artifact plumbing: the MATDS dataset format, the MATMODEL model
// format, atomic file writes and float formatting shared by every command.

#include <string>

#include "matpca/dataset.hpp"
#include "matpca/hrfpca.hpp"

namespace matpca {

// Shortest-faithful decimal: 17 significant digits, round-trips bit-exactly.
std::string format_double(double x);

// Writes to "<path>.tmp" in the same directory, then renames over path.
void atomic_write_text(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

// Dataset format: header "MATDS v1 <n> <d_c> <d_r>", then n*d_c lines of
// d_r whitespace-separated floats; line i*d_c + r holds row r of sample i.
std::string dataset_to_text(const MatrixDataset& data);
MatrixDataset dataset_from_text(const std::string& text);
void write_dataset(const std::string& path, const MatrixDataset& data);
MatrixDataset read_dataset(const std::string& path);

// Model format: "MATMODEL v1" then one key per line (key then values,
// whitespace separated; matrices row-major). Load reproduces every stored
// matrix bit-exactly.
std::string model_to_text(const HrfpcaModel& model);
HrfpcaModel model_from_text(const std::string& text);
void write_model(const std::string& path, const HrfpcaModel& model);
HrfpcaModel read_model(const std::string& path);

// Minimal RFC-4180 quoting: wraps fields containing commas, quotes or
// newlines and doubles embedded quotes.
std::string csv_field(const std::string& value);

}  // namespace matpca
