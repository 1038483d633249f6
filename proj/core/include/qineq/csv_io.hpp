#pragma once

// Plain-text file formats. All writers emit UTF-8, LF line endings, '.' as
// the decimal separator and the shortest representation that parses back
// to the same double.
//
//   surface      p,beta0,...,betad        one row per knot
//   input table  <covariates...>,<y>      header row, y > 0
//   sample       x,y
//   curve        p,value
//   index        x,kind,method,value,extrapolated
//   errors       param_id,n,method,x,kind,rep,error
//   mse          param_id,alpha,beta,gamma,n,method,x,kind,mse,count,failed
//   mse_ratio    param_id,n,method,x,kind,ratio

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qineq/fld.hpp"
#include "qineq/inequality.hpp"
#include "qineq/pwl_surface.hpp"
#include "qineq/simharness.hpp"

namespace qineq::io {

std::string format_double(double v);
double parse_double(std::string_view text);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Comma-separated, first line is the header; blank lines are skipped.
CsvTable read_csv(std::istream& in);

/// Throws ParseError unless the header equals `expected` exactly.
void require_header(const CsvTable& table, const std::vector<std::string>& expected);

void write_surface(std::ostream& out, const BetaSurface& surface);
BetaSurface read_surface(std::istream& in);

struct InputTable {
  std::vector<std::string> covariate_names;
  Eigen::MatrixXd covariates;  // n x d
  Eigen::VectorXd y;
};

/// `y_column` selects the response by name; default is the last column.
InputTable read_input_table(std::istream& in, const std::optional<std::string>& y_column = std::nullopt);

void write_sample(std::ostream& out, const EfldSample& sample, std::string_view x_name = "x",
                  std::string_view y_name = "y");

void write_curve(std::ostream& out, const CurveSample& curve);

struct IndexRow {
  Eigen::VectorXd x;
  CurveKind kind;
  std::string method;
  double value;
  bool extrapolated = false;
};

/// Multi-covariate x values are joined with ':'.
void write_indices(std::ostream& out, const std::vector<IndexRow>& rows);

void write_errors(std::ostream& out, const std::vector<SimRecord>& records);
void write_mse(std::ostream& out, const std::vector<MseCell>& cells, const std::vector<EfldModel>& params);
void write_ratios(std::ostream& out, const std::vector<RatioCell>& cells);

/// Experiment config: one `key = value` per line, '#' starts a comment.
/// List values are comma-separated; each entry of `params` is
/// alpha:beta:gamma. Errors carry the offending line number.
SimConfig parse_sim_config(std::istream& in);

}  // namespace qineq::io
