#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>

#include "balkit/quadrature.hpp"
#include "balkit/samples.hpp"
#include "balkit/system.hpp"

namespace balkit {

// Matrix Market (coordinate or array; real, integer or pattern; general or
// symmetric). Parse errors carry the 1-based line number.
struct MatrixMarketData {
  bool coordinate = false;
  SparseMatrixXd sparse;
  MatrixXd dense;

  Index rows() const { return coordinate ? sparse.rows() : dense.rows(); }
  Index cols() const { return coordinate ? sparse.cols() : dense.cols(); }
  MatrixXd to_dense() const { return coordinate ? MatrixXd(sparse) : dense; }
};

MatrixMarketData read_matrix_market(std::istream& in, const std::string& name = "<stream>");
MatrixMarketData read_matrix_market(const std::filesystem::path& path);
void write_matrix_market(std::ostream& out, const MatrixXd& m);
void write_matrix_market(std::ostream& out, const SparseMatrixXd& m);

/// Manifest: {"A": "a.mtx", "B": "b.mtx", "C": "c.mtx", "E": optional,
/// "D": optional, "stable": optional bool}; paths relative to the manifest.
StateSpace load_system(const std::filesystem::path& manifest);
/// Writes <stem>_A.mtx etc. next to the manifest and the manifest itself.
void save_system(const std::filesystem::path& manifest, const StateSpace& sys);

void save_rom(const std::filesystem::path& path, const ReducedModel& rom);
void save_rom(const std::filesystem::path& path, const ComplexRom& rom);
ReducedModel load_rom(const std::filesystem::path& path);
/// Accepts real and complex ROM files (missing *_imag fields mean zero).
ComplexRom load_complex_rom(const std::filesystem::path& path);

/// CSV "omega,re_11,im_11,re_12,..." (row-major over the p x m entries)
/// plus a JSON sidecar with the same stem.
void save_samples(const std::filesystem::path& csv, const SampleSet& samples);
SampleSet load_samples(const std::filesystem::path& csv);
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

}  // namespace balkit
