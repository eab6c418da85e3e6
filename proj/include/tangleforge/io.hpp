#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "tangleforge/qstate.hpp"

namespace tangleforge {

// File formats:
//   state file    {"n_qubits": 3, "amplitudes": [[re, im], ...]}   (index order)
//   density file  {"dim": 8, "matrix": [[[re, im], ...], ...]}     (row-major)

inline nlohmann::ordered_json state_to_json(const PureState& s) {
  nlohmann::ordered_json j;
  j["n_qubits"] = s.n_qubits;
  auto& amps = j["amplitudes"] = nlohmann::ordered_json::array();
  for (long i = 0; i < s.dim(); ++i)
    amps.push_back({s.amplitudes[i].real(), s.amplitudes[i].imag()});
  return j;
}

inline nlohmann::ordered_json density_to_json(const DensityMatrix& rho) {
  nlohmann::ordered_json j;
  j["dim"] = rho.dim();
  auto& rows = j["matrix"] = nlohmann::ordered_json::array();
  for (long r = 0; r < rho.dim(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (long c = 0; c < rho.dim(); ++c)
      row.push_back({rho.entries(r, c).real(), rho.entries(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return j;
}

namespace detail {

inline Complex complex_from_json(const nlohmann::json& j) {
  require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(),
          errc::bad_file, "complex entries must be [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline nlohmann::json parse_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::bad_file, "cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
  require(!j.is_discarded(), errc::bad_file, "invalid JSON in " + path);
  return j;
}

}  // namespace detail

inline PureState state_from_json(const nlohmann::json& j) {
  require(j.is_object() && j.contains("n_qubits") && j.contains("amplitudes"),
          errc::bad_file, "state file needs n_qubits and amplitudes");
  require(j["n_qubits"].is_number_integer(), errc::bad_file, "n_qubits must be an integer");
  const int n = j["n_qubits"].get<int>();
  require(n >= 2 && n <= 5, errc::bad_length, "supported qubit counts are 2..5");
  const auto& amps = j["amplitudes"];
  require(amps.is_array(), errc::bad_file, "amplitudes must be an array");
  require(static_cast<long>(amps.size()) == (1L << n), errc::bad_length,
          "amplitude count does not match n_qubits");
  std::vector<Complex> v;
  v.reserve(amps.size());
  for (const auto& entry : amps) v.push_back(detail::complex_from_json(entry));
  return make_pure(v, /*normalize=*/false);
}

inline DensityMatrix density_from_json(const nlohmann::json& j) {
  require(j.is_object() && j.contains("dim") && j.contains("matrix"), errc::bad_file,
          "density file needs dim and matrix");
  require(j["dim"].is_number_integer(), errc::bad_file, "dim must be an integer");
  const long dim = j["dim"].get<long>();
  require(dim == 4 || dim == 8 || dim == 16 || dim == 32, errc::wrong_size,
          "supported dimensions are 4, 8, 16, 32");
  const auto& rows = j["matrix"];
  require(rows.is_array() && static_cast<long>(rows.size()) == dim, errc::bad_file,
          "matrix row count does not match dim");
  Mat m(dim, dim);
  for (long r = 0; r < dim; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    require(row.is_array() && static_cast<long>(row.size()) == dim, errc::bad_file,
            "matrix column count does not match dim");
    for (long c = 0; c < dim; ++c)
      m(r, c) = detail::complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  DensityMatrix rho{std::move(m)};
  validate_density(rho);
  return rho;
}

inline PureState read_state_file(const std::string& path) {
  return state_from_json(detail::parse_file(path));
}

inline DensityMatrix read_density_file(const std::string& path) {
  return density_from_json(detail::parse_file(path));
}

inline void write_json_file(const std::string& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path);
  require(out.good(), errc::bad_file, "cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace tangleforge
