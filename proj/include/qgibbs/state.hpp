// Copyright 2026 The qgibbs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Amplitude-level simulation substrate. The pipeline state lives in the
// invariant subspace spanned by (eigenindex a, environment row mu, energy
// grid value j, flag bits f), which stays closed under energy marking,
// flag-conditioned rotations, and the two reflection families. Flag packing
// is little-endian: bit 0 is the Gibbs-rotation ancilla, bit 1 the ratio
// ancilla. Serialized dumps use the same index order.

#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <vector>

#include "qgibbs/linalg.hpp"

namespace qgibbs {

struct RegisterLayout {
  std::size_t system_dim = 1;  // D
  int energy_bits = 1;         // m
  int flag_count = 2;
  double emax = 0.0;

  std::size_t grid_size() const { return std::size_t{1} << energy_bits; }
  std::size_t flag_states() const { return std::size_t{1} << flag_count; }
  // The energy register discretizes [0, 8 emax): one grid step per unit of
  // 8 emax / 2^m, so a full phase wrap corresponds to 8 emax.
  double grid_base() const {
    return 8.0 * emax / static_cast<double>(grid_size());
  }
  double grid_energy(std::size_t j) const {
    return grid_base() * static_cast<double>(j);
  }
  bool operator==(const RegisterLayout& o) const {
    return system_dim == o.system_dim && energy_bits == o.energy_bits &&
           flag_count == o.flag_count && emax == o.emax;
  }
};

// Compressed pipeline state. mult counts explicit environment rows per
// eigencomponent (1 for the standard pipeline, scratchpad x bath for the
// supplied-process mode). orthogonal_rows records whether distinct (a, mu)
// rows carry mutually orthogonal environment states, which makes reduced
// system states diagonal in the eigenbasis.
class CompressedState {
 public:
  RegisterLayout layout;
  std::size_t mult = 1;
  bool orthogonal_rows = true;
  std::vector<cplx> amplitudes;
  // Tracked upper bound on squared-norm mass lying outside the two closest
  // grid values per eigencomponent. Never decreased except at explicit
  // renormalization points.
  double badmass = 0.0;

  CompressedState() = default;
  CompressedState(RegisterLayout lay, std::size_t mult_rows = 1)
      : layout(lay), mult(mult_rows),
        amplitudes(lay.system_dim * mult_rows * lay.grid_size() *
                       lay.flag_states(),
                   cplx(0.0, 0.0)) {}

  std::size_t idx(std::size_t a, std::size_t mu, std::size_t j,
                  std::size_t f) const {
    return ((a * mult + mu) * layout.grid_size() + j) * layout.flag_states() +
           f;
  }
  cplx& at(std::size_t a, std::size_t mu, std::size_t j, std::size_t f) {
    return amplitudes[idx(a, mu, j, f)];
  }
  const cplx& at(std::size_t a, std::size_t mu, std::size_t j,
                 std::size_t f) const {
    return amplitudes[idx(a, mu, j, f)];
  }

  double squared_norm() const {
    double s = 0.0;
    for (const cplx& v : amplitudes) s += std::norm(v);
    return s;
  }

  // Squared mass with the given flag bit equal to bit_value.
  double flag_weight(int which_flag, int bit_value) const {
    const std::size_t fs = layout.flag_states();
    double s = 0.0;
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
      const std::size_t f = i % fs;
      if (((f >> which_flag) & 1u) == static_cast<std::size_t>(bit_value))
        s += std::norm(amplitudes[i]);
    }
    return s;
  }
};

inline void check_same_shape(const CompressedState& a,
                             const CompressedState& b) {
  if (!(a.layout == b.layout) || a.mult != b.mult)
    throw std::invalid_argument("states have mismatched register layouts");
}

inline cplx inner_product(const CompressedState& a, const CompressedState& b) {
  check_same_shape(a, b);
  cplx s(0.0, 0.0);
  for (std::size_t i = 0; i < a.amplitudes.size(); ++i)
    s += std::conj(a.amplitudes[i]) * b.amplitudes[i];
  return s;
}

// Uniform superposition over eigencomponents with energy register |0> and
// flags |0>; the environment pairing makes the reduced system state I/D.
inline CompressedState maximally_entangled_init(const RegisterLayout& layout) {
  if (layout.system_dim < 1) throw std::invalid_argument("empty system");
  CompressedState st(layout, 1);
  const double amp = 1.0 / std::sqrt(static_cast<double>(layout.system_dim));
  for (std::size_t a = 0; a < layout.system_dim; ++a)
    st.at(a, 0, 0, 0) = cplx(amp, 0.0);
  return st;
}

// Negates every component whose selected flag bit is 1.
inline void reflection_about_flag(CompressedState& st, int which_flag) {
  if (which_flag < 0 || which_flag >= st.layout.flag_count)
    throw std::invalid_argument("flag index out of range");
  const std::size_t fs = st.layout.flag_states();
  for (std::size_t i = 0; i < st.amplitudes.size(); ++i)
    if (((i % fs) >> which_flag) & 1u) st.amplitudes[i] = -st.amplitudes[i];
}

// Multiplies components whose selected flag bit equals bit_value by phase.
inline void phase_on_flag(CompressedState& st, int which_flag, int bit_value,
                          cplx phase) {
  if (which_flag < 0 || which_flag >= st.layout.flag_count)
    throw std::invalid_argument("flag index out of range");
  const std::size_t fs = st.layout.flag_states();
  for (std::size_t i = 0; i < st.amplitudes.size(); ++i)
    if ((((i % fs) >> which_flag) & 1u) == static_cast<std::size_t>(bit_value))
      st.amplitudes[i] *= phase;
}

// v <- (I - 2 |axis><axis|) v: the axis maps to its negative, orthogonal
// vectors are untouched.
inline void reflection_about_state(CompressedState& st,
                                   const CompressedState& axis) {
  check_same_shape(st, axis);
  const cplx ov = inner_product(axis, st);
  for (std::size_t i = 0; i < st.amplitudes.size(); ++i)
    st.amplitudes[i] -= 2.0 * ov * axis.amplitudes[i];
}

// Energy-conditioned flag rotation: on the subspace where the target flag
// bit is 0, the flag qubit becomes sin(theta)|0> + cos(theta)|1> with
// sin(theta) = exp(-beta' E / 2) at the recorded grid energy E. Implemented
// as the full two-level rotation so the operation is unitary on the whole
// space; the pipeline always applies it with the target bit fresh.
inline void conditional_rotation(CompressedState& st, double beta_prime,
                                 int target_flag) {
  if (beta_prime < 0.0)
    throw std::domain_error("rotation requires nonnegative beta");
  if (target_flag < 0 || target_flag >= st.layout.flag_count)
    throw std::invalid_argument("flag index out of range");
  const std::size_t fs = st.layout.flag_states();
  const std::size_t grid = st.layout.grid_size();
  const std::size_t rows = st.layout.system_dim * st.mult;
  const std::size_t bit = std::size_t{1} << target_flag;
  for (std::size_t j = 0; j < grid; ++j) {
    const double s = std::exp(-0.5 * beta_prime * st.layout.grid_energy(j));
    const double c = std::sqrt(std::max(0.0, 1.0 - s * s));
    for (std::size_t row = 0; row < rows; ++row) {
      const std::size_t base = (row * grid + j) * fs;
      for (std::size_t f = 0; f < fs; ++f) {
        if (f & bit) continue;
        cplx& a0 = st.amplitudes[base + f];
        cplx& a1 = st.amplitudes[base + (f | bit)];
        const cplx n0 = s * a0 - c * a1;
        const cplx n1 = c * a0 + s * a1;
        a0 = n0;
        a1 = n1;
      }
    }
  }
}

// Reduced system density matrix in the computational basis; basis columns
// are the eigenvectors that label the compressed rows.
inline MatrixC reduced_system_state(const CompressedState& st,
                                    const MatrixC& basis) {
  const auto d = static_cast<Eigen::Index>(st.layout.system_dim);
  if (basis.rows() != d || basis.cols() != d)
    throw std::invalid_argument("basis dimension mismatch");
  MatrixC rho_eig = MatrixC::Zero(d, d);
  const std::size_t per_row = st.layout.grid_size() * st.layout.flag_states();
  if (st.orthogonal_rows) {
    for (std::size_t a = 0; a < st.layout.system_dim; ++a) {
      double w = 0.0;
      for (std::size_t mu = 0; mu < st.mult; ++mu) {
        const std::size_t base = (a * st.mult + mu) * per_row;
        for (std::size_t r = 0; r < per_row; ++r)
          w += std::norm(st.amplitudes[base + r]);
      }
      rho_eig(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) = w;
    }
  } else {
    for (std::size_t a = 0; a < st.layout.system_dim; ++a)
      for (std::size_t b = 0; b <= a; ++b) {
        cplx acc(0.0, 0.0);
        for (std::size_t mu = 0; mu < st.mult; ++mu) {
          const std::size_t ba = (a * st.mult + mu) * per_row;
          const std::size_t bb = (b * st.mult + mu) * per_row;
          for (std::size_t r = 0; r < per_row; ++r)
            acc += st.amplitudes[ba + r] * std::conj(st.amplitudes[bb + r]);
        }
        rho_eig(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            acc;
        rho_eig(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) =
            std::conj(acc);
      }
  }
  return basis * rho_eig * basis.adjoint();
}

// Renormalizes at a stage boundary, returning the norm drift |n^2 - 1|
// found; silent renormalization elsewhere is forbidden by contract.
inline double renormalize_stage(CompressedState& st) {
  const double n2 = st.squared_norm();
  const double drift = std::abs(n2 - 1.0);
  if (n2 > 0.0) {
    const double inv = 1.0 / std::sqrt(n2);
    for (cplx& v : st.amplitudes) v *= inv;
  }
  return drift;
}

// Full-representation validation state over system x scratchpad x energy x
// flags; the scratchpad axis makes environment orthogonality explicit.
struct FullState {
  RegisterLayout layout;
  std::vector<cplx> amplitudes;  // ((a_sys * D + a_scr) * grid + j) * fs + f

  explicit FullState(RegisterLayout lay)
      : layout(lay),
        amplitudes(lay.system_dim * lay.system_dim * lay.grid_size() *
                       lay.flag_states(),
                   cplx(0.0, 0.0)) {}
  std::size_t idx(std::size_t a, std::size_t s, std::size_t j,
                  std::size_t f) const {
    return ((a * layout.system_dim + s) * layout.grid_size() + j) *
               layout.flag_states() +
           f;
  }
  double squared_norm() const {
    double t = 0.0;
    for (const cplx& v : amplitudes) t += std::norm(v);
    return t;
  }
};

inline FullState expand_to_full(const CompressedState& st) {
  if (st.mult != 1)
    throw std::invalid_argument("expansion is defined for single-row states");
  FullState full(st.layout);
  const std::size_t grid = st.layout.grid_size();
  const std::size_t fs = st.layout.flag_states();
  for (std::size_t a = 0; a < st.layout.system_dim; ++a)
    for (std::size_t j = 0; j < grid; ++j)
      for (std::size_t f = 0; f < fs; ++f)
        full.amplitudes[full.idx(a, a, j, f)] = st.at(a, 0, j, f);
  return full;
}

// Reads back the diagonal scratchpad pairing; mass elsewhere is leakage out
// of the invariant subspace and is reported through *leakage.
inline CompressedState compress_from_full(const FullState& full,
                                          double* leakage = nullptr) {
  CompressedState st(full.layout, 1);
  const std::size_t grid = full.layout.grid_size();
  const std::size_t fs = full.layout.flag_states();
  double leak = 0.0;
  for (std::size_t a = 0; a < full.layout.system_dim; ++a)
    for (std::size_t s = 0; s < full.layout.system_dim; ++s)
      for (std::size_t j = 0; j < grid; ++j)
        for (std::size_t f = 0; f < fs; ++f) {
          const cplx v = full.amplitudes[full.idx(a, s, j, f)];
          if (a == s)
            st.at(a, 0, j, f) = v;
          else
            leak += std::norm(v);
        }
  if (leakage) *leakage = leak;
  return st;
}

inline void full_reflection_about_flag(FullState& st, int which_flag) {
  const std::size_t fs = st.layout.flag_states();
  for (std::size_t i = 0; i < st.amplitudes.size(); ++i)
    if (((i % fs) >> which_flag) & 1u) st.amplitudes[i] = -st.amplitudes[i];
}

inline void full_conditional_rotation(FullState& st, double beta_prime,
                                      int target_flag) {
  if (beta_prime < 0.0)
    throw std::domain_error("rotation requires nonnegative beta");
  const std::size_t fs = st.layout.flag_states();
  const std::size_t grid = st.layout.grid_size();
  const std::size_t rows = st.layout.system_dim * st.layout.system_dim;
  const std::size_t bit = std::size_t{1} << target_flag;
  for (std::size_t j = 0; j < grid; ++j) {
    const double s = std::exp(-0.5 * beta_prime * st.layout.grid_energy(j));
    const double c = std::sqrt(std::max(0.0, 1.0 - s * s));
    for (std::size_t row = 0; row < rows; ++row) {
      const std::size_t base = (row * grid + j) * fs;
      for (std::size_t f = 0; f < fs; ++f) {
        if (f & bit) continue;
        cplx& a0 = st.amplitudes[base + f];
        cplx& a1 = st.amplitudes[base + (f | bit)];
        const cplx n0 = s * a0 - c * a1;
        const cplx n1 = c * a0 + s * a1;
        a0 = n0;
        a1 = n1;
      }
    }
  }
}

inline cplx full_inner_product(const FullState& a, const FullState& b) {
  cplx s(0.0, 0.0);
  for (std::size_t i = 0; i < a.amplitudes.size(); ++i)
    s += std::conj(a.amplitudes[i]) * b.amplitudes[i];
  return s;
}

inline void full_reflection_about_state(FullState& st, const FullState& axis) {
  const cplx ov = full_inner_product(axis, st);
  for (std::size_t i = 0; i < st.amplitudes.size(); ++i)
    st.amplitudes[i] -= 2.0 * ov * axis.amplitudes[i];
}

// Binary amplitude dump: 8-byte magic, then D, m, flag_count, mult as
// little-endian uint32, then (re, im) float32 pairs in index order.
inline constexpr char kStateMagic[8] = {'Q', 'G', 'A', 'M', 'P', '0', '0', '1'};

inline void dump_state(const CompressedState& st, std::ostream& out) {
  out.write(kStateMagic, 8);
  const std::uint32_t header[4] = {
      static_cast<std::uint32_t>(st.layout.system_dim),
      static_cast<std::uint32_t>(st.layout.energy_bits),
      static_cast<std::uint32_t>(st.layout.flag_count),
      static_cast<std::uint32_t>(st.mult)};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  for (const cplx& v : st.amplitudes) {
    const float re = static_cast<float>(v.real());
    const float im = static_cast<float>(v.imag());
    out.write(reinterpret_cast<const char*>(&re), sizeof(float));
    out.write(reinterpret_cast<const char*>(&im), sizeof(float));
  }
}

inline CompressedState load_state(std::istream& in, double emax) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kStateMagic, 8) != 0)
    throw std::runtime_error("bad state dump header");
  std::uint32_t header[4];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in) throw std::runtime_error("truncated state dump header");
  RegisterLayout lay;
  lay.system_dim = header[0];
  lay.energy_bits = static_cast<int>(header[1]);
  lay.flag_count = static_cast<int>(header[2]);
  lay.emax = emax;
  CompressedState st(lay, header[3]);
  for (cplx& v : st.amplitudes) {
    float re = 0.0f, im = 0.0f;
    in.read(reinterpret_cast<char*>(&re), sizeof(float));
    in.read(reinterpret_cast<char*>(&im), sizeof(float));
    if (!in) throw std::runtime_error("truncated state dump payload");
    v = cplx(re, im);
  }
  return st;
}

}  // namespace qgibbs
