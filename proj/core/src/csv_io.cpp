#include "qineq/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "qineq/errors.hpp"

namespace qineq::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string join_x(const Eigen::VectorXd& x) {
  std::string s;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) s += ':';
    s += format_double(x(i));
  }
  return s;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ParseError("not a number: '" + std::string(text) + "'");
  return v;
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    if (!have_header) {
      if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
        fields.front().erase(0, 3);
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size())
      throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                       " fields, got " + std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
  }
  if (!have_header) throw ParseError("empty CSV input");
  return t;
}

void require_header(const CsvTable& table, const std::vector<std::string>& expected) {
  if (table.header != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw ParseError("unexpected CSV header; expected '" + want + "'");
  }
}

void write_surface(std::ostream& out, const BetaSurface& surface) {
  out << "p";
  for (int i = 0; i <= surface.dim(); ++i) out << ",beta" << i;
  out << '\n';
  const Eigen::MatrixXd& c = surface.coeffs();
  for (int j = 0; j < surface.grid().size(); ++j) {
    out << format_double(surface.grid().knot(j));
    for (Eigen::Index i = 0; i < c.cols(); ++i) out << ',' << format_double(c(j, i));
    out << '\n';
  }
}

BetaSurface read_surface(std::istream& in) {
  const CsvTable t = read_csv(in);
  if (t.header.size() < 2 || t.header[0] != "p") throw ParseError("surface CSV: header must start with p,beta0");
  for (std::size_t i = 1; i < t.header.size(); ++i)
    if (t.header[i] != "beta" + std::to_string(i - 1))
      throw ParseError("surface CSV: column " + std::to_string(i + 1) + " must be beta" + std::to_string(i - 1));
  if (t.rows.size() < 3) throw ParseError("surface CSV: need at least 3 knot rows (m >= 4)");
  const int m = static_cast<int>(t.rows.size()) + 1;
  const ProbGrid grid(m);
  Eigen::MatrixXd c(grid.size(), static_cast<Eigen::Index>(t.header.size() - 1));
  for (int j = 0; j < grid.size(); ++j) {
    const auto& row = t.rows[static_cast<std::size_t>(j)];
    const double p = parse_double(row[0]);
    if (std::abs(p - grid.knot(j)) > 1e-12)
      throw ParseError("surface CSV: row " + std::to_string(j + 2) + " has p=" + row[0] + ", expected " +
                       format_double(grid.knot(j)) + " (grid must be j/m)");
    for (std::size_t i = 1; i < row.size(); ++i) c(j, static_cast<Eigen::Index>(i - 1)) = parse_double(row[i]);
  }
  return BetaSurface(grid, std::move(c));
}

InputTable read_input_table(std::istream& in, const std::optional<std::string>& y_column) {
  const CsvTable t = read_csv(in);
  if (t.header.size() < 1) throw ParseError("input CSV: no columns");
  std::size_t ycol = t.header.size() - 1;
  if (y_column) {
    const auto it = std::find(t.header.begin(), t.header.end(), *y_column);
    if (it == t.header.end()) throw ParseError("input CSV: no column named '" + *y_column + "'");
    ycol = static_cast<std::size_t>(it - t.header.begin());
  }
  InputTable out;
  for (std::size_t c = 0; c < t.header.size(); ++c)
    if (c != ycol) out.covariate_names.push_back(t.header[c]);
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  const auto d = static_cast<Eigen::Index>(out.covariate_names.size());
  out.covariates.resize(n, d);
  out.y.resize(n);
  std::vector<std::size_t> bad;
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = t.rows[static_cast<std::size_t>(r)];
    Eigen::Index k = 0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c].empty())
        throw ParseError("input CSV: missing value at line " + std::to_string(r + 2) + ", column '" +
                         t.header[c] + "'");
      double v;
      try {
        v = parse_double(row[c]);
      } catch (const ParseError&) {
        throw ParseError("input CSV: line " + std::to_string(r + 2) + ", column '" + t.header[c] +
                         "': not a number '" + row[c] + "'");
      }
      if (!std::isfinite(v))
        throw ParseError("input CSV: non-finite value at line " + std::to_string(r + 2));
      if (c == ycol) {
        out.y(r) = v;
        if (!(v > 0.0)) bad.push_back(static_cast<std::size_t>(r + 2));
      } else {
        out.covariates(r, k++) = v;
      }
    }
  }
  if (!bad.empty()) {
    std::string lines;
    for (std::size_t i = 0; i < bad.size() && i < 20; ++i) lines += (i ? ", " : "") + std::to_string(bad[i]);
    if (bad.size() > 20) lines += ", ...";
    throw DomainError("input CSV: response must be > 0 (log transform); offending lines: " + lines);
  }
  return out;
}

void write_sample(std::ostream& out, const EfldSample& sample, std::string_view x_name, std::string_view y_name) {
  out << x_name << ',' << y_name << '\n';
  for (Eigen::Index i = 0; i < sample.x.size(); ++i)
    out << format_double(sample.x(i)) << ',' << format_double(sample.y(i)) << '\n';
}

void write_curve(std::ostream& out, const CurveSample& curve) {
  out << "p,value\n";
  for (std::size_t k = 0; k < curve.ps.size(); ++k)
    out << format_double(curve.ps[k]) << ',' << format_double(curve.values[k]) << '\n';
}

void write_indices(std::ostream& out, const std::vector<IndexRow>& rows) {
  out << "x,kind,method,value,extrapolated\n";
  for (const auto& r : rows)
    out << join_x(r.x) << ',' << to_string(r.kind) << ',' << r.method << ',' << format_double(r.value) << ','
        << (r.extrapolated ? "true" : "false") << '\n';
}

void write_errors(std::ostream& out, const std::vector<SimRecord>& records) {
  out << "param_id,n,method,x,kind,rep,error\n";
  for (const auto& r : records)
    out << r.param_id << ',' << r.n << ',' << to_string(r.method) << ',' << format_double(r.x) << ','
        << to_string(r.kind) << ',' << r.rep << ',' << format_double(r.error) << '\n';
}

void write_mse(std::ostream& out, const std::vector<MseCell>& cells, const std::vector<EfldModel>& params) {
  out << "param_id,alpha,beta,gamma,n,method,x,kind,mse,count,failed\n";
  for (const auto& c : cells) {
    const EfldModel& p = params.at(static_cast<std::size_t>(c.param_id));
    out << c.param_id << ',' << format_double(p.alpha) << ',' << format_double(p.beta) << ','
        << format_double(p.gamma) << ',' << c.n << ',' << to_string(c.method) << ',' << format_double(c.x) << ','
        << to_string(c.kind) << ',' << format_double(c.mse) << ',' << c.count << ',' << c.failed << '\n';
  }
}

void write_ratios(std::ostream& out, const std::vector<RatioCell>& cells) {
  out << "param_id,n,method,x,kind,ratio\n";
  for (const auto& c : cells)
    out << c.param_id << ',' << c.n << ',' << to_string(c.method) << ',' << format_double(c.x) << ','
        << to_string(c.kind) << ',' << format_double(c.ratio) << '\n';
}

SimConfig parse_sim_config(std::istream& in) {
  SimConfig cfg = default_sim_config();
  std::string line;
  int lineno = 0;
  std::set<std::string> seen;
  auto fail = [&](const std::string& msg) -> ParseError {
    return ParseError("config line " + std::to_string(lineno) + ": " + msg);
  };
  auto to_int = [&](std::string_view s) {
    const double v = parse_double(s);
    if (v != std::floor(v) || std::abs(v) > 1e15) throw fail("expected an integer, got '" + std::string(s) + "'");
    return static_cast<long long>(v);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw fail("expected 'key = value'");
    const std::string key(trim(body.substr(0, eq)));
    const std::string_view value = trim(body.substr(eq + 1));
    if (value.empty()) throw fail("empty value for '" + key + "'");
    if (!seen.insert(key).second) throw fail("duplicate key '" + key + "'");
    try {
      const std::vector<std::string> items = split(value, ',');
      if (key == "params") {
        cfg.params.clear();
        for (const auto& it : items) {
          const auto parts = split(it, ':');
          if (parts.size() != 3) throw fail("params entries must be alpha:beta:gamma, got '" + it + "'");
          cfg.params.push_back(EfldModel{parse_double(parts[0]), parse_double(parts[1]), parse_double(parts[2])});
        }
      } else if (key == "ns") {
        cfg.ns.clear();
        for (const auto& it : items) cfg.ns.push_back(static_cast<int>(to_int(it)));
      } else if (key == "reps") {
        cfg.reps = static_cast<int>(to_int(value));
      } else if (key == "methods") {
        cfg.methods.clear();
        for (const auto& it : items) cfg.methods.push_back(parse_method(it));
      } else if (key == "m") {
        cfg.m = static_cast<int>(to_int(value));
      } else if (key == "eval_xs") {
        cfg.eval_xs.clear();
        for (const auto& it : items) cfg.eval_xs.push_back(parse_double(it));
      } else if (key == "base_seed") {
        cfg.base_seed = static_cast<std::uint64_t>(to_int(value));
      } else if (key == "n_points") {
        cfg.n_points = static_cast<int>(to_int(value));
      } else if (key == "x_lo") {
        cfg.x_lo = parse_double(value);
      } else if (key == "x_hi") {
        cfg.x_hi = parse_double(value);
      } else if (key == "tau_rule") {
        cfg.tau_rule = parse_tau_rule(value);
      } else if (key == "tau") {
        cfg.tau = parse_double(value);
      } else if (key == "workers") {
        cfg.workers = static_cast<int>(to_int(value));
      } else if (key == "enforce_on_support") {
        if (value == "true") {
          cfg.enforce_on_support = true;
        } else if (value == "false") {
          cfg.enforce_on_support = false;
        } else {
          throw fail("enforce_on_support must be true or false");
        }
      } else {
        throw fail("unknown key '" + key + "'");
      }
    } catch (const ParseError& e) {
      const std::string what = e.what();
      if (what.rfind("config line", 0) == 0) throw;
      throw fail(what);
    }
  }
  try {
    cfg.validate();
  } catch (const ContractError& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return cfg;
}

}  // namespace qineq::io
