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

#include "qcoarse/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "qcoarse/errors.hpp"
#include "qcoarse/simulate.hpp"

namespace qcoarse {

namespace {

std::ifstream open_in(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path + "' for reading");
    }
    return in;
}

std::ofstream open_out(const std::string &path) {
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot open '" + path + "' for writing");
    }
    return out;
}

// Next line that is neither blank nor a '#' comment.
bool next_line(std::istream &in, std::string &line) {
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
}

std::vector<std::string> split_ws(const std::string &line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::vector<std::string> split_char(const std::string &line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

long long parse_int(const std::string &text) {
    long long v = 0;
    const auto *end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) {
        throw InputError("expected an integer, got '" + text + "'");
    }
    return v;
}

std::vector<std::string> expect_tokens(std::istream &in, std::size_t count, const char *what) {
    std::string line;
    if (!next_line(in, line)) {
        throw InputError(std::string("unexpected end of input reading ") + what);
    }
    auto tok = split_ws(line);
    if (tok.size() != count) {
        throw InputError(std::string("malformed ") + what + " line: '" + line + "'");
    }
    return tok;
}

void write_matrix(std::ostream &out, const Eigen::MatrixXcd &m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out << (c ? " " : "") << format_double(m(r, c).real()) << ' ' << format_double(m(r, c).imag());
        }
        out << '\n';
    }
}

Eigen::MatrixXcd read_matrix(std::istream &in, Eigen::Index rows, Eigen::Index cols, const char *what) {
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto tok = expect_tokens(in, static_cast<std::size_t>(2 * cols), what);
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = cplx(parse_double(tok[static_cast<std::size_t>(2 * c)]),
                           parse_double(tok[static_cast<std::size_t>(2 * c + 1)]));
        }
    }
    return m;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string &text) {
    double v = 0.0;
    const char *begin = text.data();
    const char *end = begin + text.size();
    if (begin != end && *begin == '+') ++begin;
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end) {
        throw InputError("expected a number, got '" + text + "'");
    }
    return v;
}

std::uint64_t fnv1a(const std::string &data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : data) {
        h = (h ^ c) * 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

WaitTimeDistribution load_tabulated(const std::string &path) {
    auto in = open_in(path);
    std::vector<double> t, d;
    std::string line;
    while (next_line(in, line)) {
        const auto tok = split_ws(line);
        if (tok.size() != 2) {
            throw InputError("tabulated file '" + path + "' needs two columns per row: '" + line + "'");
        }
        t.push_back(parse_double(tok[0]));
        d.push_back(parse_double(tok[1]));
    }
    return WaitTimeDistribution::tabulated(std::move(t), std::move(d));
}

void write_expsum(std::ostream &out, const ExpSum &sum) {
    out << sum.size() << ' ' << format_double(sum.domain_scale) << ' ' << format_double(sum.time_scale) << '\n';
    for (const auto &t : sum.terms) {
        out << format_double(t.weight.real()) << ' ' << format_double(t.weight.imag()) << ' '
            << format_double(t.decay) << ' ' << format_double(t.frequency) << '\n';
    }
}

ExpSum read_expsum(std::istream &in) {
    std::string line;
    if (!next_line(in, line)) {
        throw InputError("empty exponential-sum input");
    }
    const auto head = split_ws(line);
    if (head.size() < 2 || head.size() > 3) {
        throw InputError("malformed exponential-sum header: '" + line + "'");
    }
    const long long n = parse_int(head[0]);
    if (n < 0) {
        throw InputError("negative term count");
    }
    ExpSum sum;
    sum.domain_scale = parse_double(head[1]);
    sum.time_scale = head.size() == 3 ? parse_double(head[2]) : 1.0;
    for (long long i = 0; i < n; ++i) {
        const auto tok = expect_tokens(in, 4, "exponential-sum term");
        ExpTerm t;
        t.weight = cplx(parse_double(tok[0]), parse_double(tok[1]));
        t.decay = parse_double(tok[2]);
        t.frequency = parse_double(tok[3]);
        sum.terms.push_back(t);
    }
    return sum;
}

void save_expsum(const std::string &path, const ExpSum &sum) {
    auto out = open_out(path);
    write_expsum(out, sum);
}

ExpSum load_expsum(const std::string &path) {
    auto in = open_in(path);
    return read_expsum(in);
}

void write_model(std::ostream &out, const QuantumModel &model) {
    out << "qcoarse-model 1\n";
    out << model.dimension << ' ' << model.source.size() << ' ' << format_double(model.dt) << ' '
        << format_double(model.eta) << ' ' << model.ancilla << '\n';
    out << "generators\n";
    write_matrix(out, model.generators);
    out << "reset\n";
    write_matrix(out, model.reset.transpose());
    out << "unitary\n";
    write_matrix(out, model.unitary);
    out << "expsum\n";
    write_expsum(out, model.source);
}

QuantumModel read_model(std::istream &in) {
    auto tag = expect_tokens(in, 2, "model header");
    if (tag[0] != "qcoarse-model" || tag[1] != "1") {
        throw InputError("not a model artifact");
    }
    const auto head = expect_tokens(in, 5, "model dimensions");
    QuantumModel m;
    m.dimension = parse_int(head[0]);
    const long long n = parse_int(head[1]);
    m.dt = parse_double(head[2]);
    m.eta = parse_double(head[3]);
    m.ancilla = parse_int(head[4]);
    if (m.dimension < 1 || n < 1 || m.ancilla < 2) {
        throw InputError("model dimensions out of range");
    }
    auto section = [&](const char *name) {
        const auto tok = expect_tokens(in, 1, "section tag");
        if (tok[0] != name) {
            throw InputError(std::string("expected section '") + name + "', got '" + tok[0] + "'");
        }
    };
    section("generators");
    m.generators = read_matrix(in, m.dimension, n, "generator row");
    section("reset");
    m.reset = read_matrix(in, 1, m.dimension, "reset row").transpose();
    section("unitary");
    const Eigen::Index dim = m.dimension * m.ancilla;
    m.unitary = read_matrix(in, dim, dim, "unitary row");
    section("expsum");
    m.source = read_expsum(in);
    if (static_cast<long long>(m.source.size()) != n) {
        throw InputError("embedded exponential sum does not match the generator count");
    }
    return m;
}

void save_model(const std::string &path, const QuantumModel &model) {
    auto out = open_out(path);
    write_model(out, model);
}

QuantumModel load_model(const std::string &path) {
    auto in = open_in(path);
    return read_model(in);
}

std::uint64_t model_hash(const QuantumModel &model) {
    std::ostringstream ss;
    write_model(ss, model);
    return fnv1a(ss.str());
}

void write_waits(std::ostream &out, const std::vector<long long> &waits, std::uint64_t seed, double dt,
                 std::uint64_t hash) {
    out << "# seed=" << seed << '\n';
    out << "# dt=" << format_double(dt) << '\n';
    out << "# model_hash=" << hex64(hash) << '\n';
    out << "# rng=" << kRngName << '\n';
    for (long long w : waits) {
        out << w << '\n';
    }
}

std::vector<long long> read_waits(std::istream &in) {
    std::vector<long long> out;
    std::string line;
    while (next_line(in, line)) {
        const auto tok = split_ws(line);
        if (tok.size() != 1) {
            throw InputError("wait file rows hold one integer: '" + line + "'");
        }
        out.push_back(parse_int(tok[0]));
    }
    return out;
}

void write_hsmm(std::ostream &out, const Hsmm &h) {
    out << "modes";
    for (const auto &m : h.modes) out << ' ' << m;
    out << "\nevents";
    for (const auto &x : h.events) out << ' ' << x;
    out << '\n';
    for (const Edge &e : h.edges) {
        out << h.modes[static_cast<std::size_t>(e.from)] << ' ' << h.events[static_cast<std::size_t>(e.symbol)] << ' '
            << h.modes[static_cast<std::size_t>(e.to)] << ' ' << format_double(e.prob) << ' ' << e.dwell.describe()
            << '\n';
    }
}

Hsmm read_hsmm(std::istream &in) {
    Hsmm h;
    std::string line;
    bool have_modes = false, have_events = false;
    while (next_line(in, line)) {
        auto tok = split_ws(line);
        if (tok[0] == "modes" || tok[0] == "events") {
            auto &dst = tok[0] == "modes" ? h.modes : h.events;
            (tok[0] == "modes" ? have_modes : have_events) = true;
            dst.assign(tok.begin() + 1, tok.end());
            continue;
        }
        if (!have_modes || !have_events) {
            throw InputError("'modes' and 'events' must precede transition rows");
        }
        if (tok.size() != 5) {
            throw InputError("transition rows read `g x g' prob dwell_spec`: '" + line + "'");
        }
        Edge e;
        e.from = h.mode_index(tok[0]);
        e.symbol = h.event_index(tok[1]);
        e.to = h.mode_index(tok[2]);
        e.prob = parse_double(tok[3]);
        e.dwell = parse_distribution(tok[4]);
        h.edges.push_back(e);
    }
    return h;
}

Hsmm load_hsmm(const std::string &path) {
    auto in = open_in(path);
    return read_hsmm(in);
}

void write_fit_report(std::ostream &out, const ClassicalFit &fit) {
    int dim = fit.model.dimension();
    for (const FitRun &r : fit.runs) dim = std::max(dim, r.model.dimension());
    out << "R,seed,final_KS,dt";
    for (int j = 0; j < dim; ++j) out << ",p_" << j;
    out << '\n';
    for (const FitRun &r : fit.runs) {
        out << r.loop << ',' << r.seed << ',' << format_double(r.ks) << ',' << format_double(r.model.dt);
        for (double p : r.model.p) out << ',' << format_double(p);
        out << '\n';
    }
}

std::vector<FitRun> read_fit_report(std::istream &in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("R,seed,final_KS,dt", 0) != 0) {
        throw InputError("missing fit report header");
    }
    std::vector<FitRun> out;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto f = split_char(line, ',');
        if (f.size() < 5) {
            throw InputError("short fit report row: '" + line + "'");
        }
        FitRun r;
        r.loop = static_cast<int>(parse_int(f[0]));
        r.seed = static_cast<int>(parse_int(f[1]));
        r.ks = parse_double(f[2]);
        r.model.dt = parse_double(f[3]);
        r.model.loop = r.loop;
        for (std::size_t j = 4; j < f.size(); ++j) r.model.p.push_back(parse_double(f[j]));
        out.push_back(std::move(r));
    }
    return out;
}

void write_scan_report(std::ostream &out, const ScanResult &scan) {
    out << "eps,eigen_index,eigenvalue,ks,terms,truncated_weight,residual,status\n";
    for (const ScanEntry &e : scan.report) {
        out << format_double(e.eps) << ',' << e.eigen_index << ',' << format_double(e.eigenvalue) << ','
            << format_double(e.ks) << ',' << e.terms << ',' << format_double(e.truncated_weight) << ','
            << format_double(e.residual) << ",ok\n";
    }
    for (const ScanFailure &f : scan.failures) {
        std::string msg = f.message;
        for (char &c : msg) {
            if (c == ',' || c == '\n') c = ';';
        }
        out << format_double(f.eps) << ",,,,,,," << "failed: " << msg << '\n';
    }
}

}  // namespace qcoarse
