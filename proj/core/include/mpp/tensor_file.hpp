#pragma once

#include <optional>
#include <string>

#include "mpp/sample.hpp"

namespace mpp::io {

// Binary tensor container:
//   "MPP1"  | u32le n | u32le p | u32le q | n*p*q f64le values
// observation-major, row-major within each observation, optionally followed
// by "LBL1" | n u8 labels. File length is exactly 4 + 12 + 8npq (+ 4 + n).
void write_tensor_file(const std::string& path, const MatrixSample& sample);
MatrixSample read_tensor_file(const std::string& path);

// CSV ingestion. Long form carries the header `obs,row,col,value` with
// 0-based indices; wide form is n rows of p*q values, row-major, and needs
// explicit dimensions. Errors name the first offending line.
MatrixSample import_csv(const std::string& path, std::optional<Index> n,
                        std::optional<Index> p, std::optional<Index> q);

// Long-form export, the inverse of import_csv.
void export_csv(const std::string& path, const MatrixSample& sample);

}  // namespace mpp::io
