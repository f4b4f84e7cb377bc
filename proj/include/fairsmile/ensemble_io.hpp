#pragma once

#include <filesystem>
#include <iosfwd>

#include "fairsmile/models.hpp"

namespace fairsmile {

// Binary ensemble file, little-endian:
//   char[8]  magic "FSMLENS\0"
//   u32      version (1)
//   u64      n_paths
//   u64      n_steps
//   f64      step_days
//   u64      seed
//   u32      tag length, followed by that many bytes of model tag
//   u8       1 if a per-path pre-window vol array follows the returns
//   u64      vol floor hit count
//   f64[n_paths * n_steps]  returns, row-major (one row per path)
//   f64[n_paths]            pre-window vols (optional)
inline constexpr char kEnsembleMagic[8] = {'F', 'S', 'M', 'L', 'E', 'N', 'S', '\0'};
inline constexpr std::uint32_t kEnsembleVersion = 1;

void write_ensemble(std::ostream& out, const PathEnsemble& e);
void write_ensemble(const std::filesystem::path& path, const PathEnsemble& e);
[[nodiscard]] PathEnsemble read_ensemble(std::istream& in);
[[nodiscard]] PathEnsemble read_ensemble(const std::filesystem::path& path);

// Plain matrix export: header step_1..step_n, one row per path.
void write_ensemble_csv(const std::filesystem::path& path, const PathEnsemble& e);

}  // namespace fairsmile
