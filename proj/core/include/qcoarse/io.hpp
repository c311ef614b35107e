// Copyright 2026 The qcoarse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QCOARSE_IO_HPP
#define QCOARSE_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qcoarse/classical.hpp"
#include "qcoarse/expsum.hpp"
#include "qcoarse/hsmm.hpp"
#include "qcoarse/processes.hpp"
#include "qcoarse/qmodel.hpp"

namespace qcoarse {

/// Two whitespace-separated columns `t density`; '#' starts a comment.
WaitTimeDistribution load_tabulated(const std::string &path);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);
/// Parses a double written by format_double (also accepts inf / nan).
double parse_double(const std::string &text);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string &data);
std::string hex64(std::uint64_t v);

/// Header `N domain_scale time_scale`, then one `c_re c_im gamma omega` row per term.
void write_expsum(std::ostream &out, const ExpSum &sum);
ExpSum read_expsum(std::istream &in);
void save_expsum(const std::string &path, const ExpSum &sum);
ExpSum load_expsum(const std::string &path);

/// Text artifact with header (d, N, dt, eta), generator matrix, reset
/// vector and unitary as rows of `re im` pairs, followed by the source sum.
void write_model(std::ostream &out, const QuantumModel &model);
QuantumModel read_model(std::istream &in);
void save_model(const std::string &path, const QuantumModel &model);
QuantumModel load_model(const std::string &path);
/// FNV-1a of the serialized artifact.
std::uint64_t model_hash(const QuantumModel &model);

/// `# key=value` header lines followed by one step count per line.
void write_waits(std::ostream &out, const std::vector<long long> &waits, std::uint64_t seed, double dt,
                 std::uint64_t model_hash);
std::vector<long long> read_waits(std::istream &in);

/// Process definition:
///   modes A B
///   events x y
///   A x B 0.5 alternating_poisson:rate=1
/// one transition row per edge, dwell given as a distribution spec.
void write_hsmm(std::ostream &out, const Hsmm &h);
Hsmm read_hsmm(std::istream &in);
Hsmm load_hsmm(const std::string &path);

/// CSV `R,seed,final_KS,dt,p_0..p_N`, one row per descent run.
void write_fit_report(std::ostream &out, const ClassicalFit &fit);
std::vector<FitRun> read_fit_report(std::istream &in);

/// CSV `eps,eigen_index,eigenvalue,ks,terms,truncated_weight,residual,status`.
void write_scan_report(std::ostream &out, const ScanResult &scan);

}  // namespace qcoarse

#endif  // QCOARSE_IO_HPP
