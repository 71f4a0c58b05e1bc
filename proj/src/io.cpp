#include "cgfit/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cgfit/errors.hpp"

namespace cgfit {

const char* version() { return "0.1.0"; }

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& what) {
  throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_double(const std::string& field, const std::string& path, std::size_t line) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && *begin == ' ') ++begin;
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end)
    parse_fail(path, line, "bad number '" + field + "'");
  return value;
}

long long parse_int(const std::string& field, const std::string& path, std::size_t line) {
  long long value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && *begin == ' ') ++begin;
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end)
    parse_fail(path, line, "bad integer '" + field + "'");
  return value;
}

json load_json(const std::string& path) {
  std::ifstream in = open_in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return j;
}

void dump_json(const json& j, const std::string& path) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed while writing '" + path + "'");
}

}  // namespace

// ---------------------------------------------------------------------------
// Unordered samples
// ---------------------------------------------------------------------------

void write_iid_csv(const IidDataset& data, const std::string& path) {
  data.validate();
  std::ofstream out = open_out(path);
  for (Index c = 0; c < data.states.cols(); ++c)
    out << (c ? "," : "") << "x_" << (c + 1);
  for (Index c = 0; c < data.cg_forces.cols(); ++c) out << ",f_" << (c + 1);
  out << '\n';
  for (Index i = 0; i < data.states.rows(); ++i) {
    for (Index c = 0; c < data.states.cols(); ++c)
      out << (c ? "," : "") << fmt17(data.states(i, c));
    for (Index c = 0; c < data.cg_forces.cols(); ++c) out << ',' << fmt17(data.cg_forces(i, c));
    out << '\n';
  }
  if (!out) throw IoError("failed while writing '" + path + "'");
}

IidDataset read_iid_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) parse_fail(path, 1, "empty file");
  ++line_no;
  const auto header = split_csv(line);
  Index n_states = 0, n_forces = 0;
  for (const auto& name : header) {
    if (name.rfind("x_", 0) == 0 && n_forces == 0)
      ++n_states;
    else if (name.rfind("f_", 0) == 0)
      ++n_forces;
    else
      parse_fail(path, line_no, "unexpected column '" + name + "'");
  }
  if (n_states == 0) parse_fail(path, line_no, "no state columns");

  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (static_cast<Index>(fields.size()) != n_states + n_forces)
      parse_fail(path, line_no, "expected " + std::to_string(n_states + n_forces) + " fields, got " +
                                    std::to_string(fields.size()));
    for (const auto& f : fields) values.push_back(parse_double(f, path, line_no));
    ++rows;
  }
  if (rows == 0) parse_fail(path, line_no, "no data rows");

  IidDataset data;
  data.states.resize(static_cast<Index>(rows), n_states);
  if (n_forces > 0) data.cg_forces.resize(static_cast<Index>(rows), n_forces);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = values.data() + i * static_cast<std::size_t>(n_states + n_forces);
    for (Index c = 0; c < n_states; ++c) data.states(static_cast<Index>(i), c) = row[c];
    for (Index c = 0; c < n_forces; ++c)
      data.cg_forces(static_cast<Index>(i), c) = row[n_states + c];
  }
  data.validate();
  return data;
}

// ---------------------------------------------------------------------------
// Recorded paths
// ---------------------------------------------------------------------------

void write_timeseries_csv(const TimeSeriesDataset& data, const std::string& path) {
  data.validate();
  std::ofstream out = open_out(path);
  out << "# h=" << fmt17(data.h) << '\n';
  out << "path_id,step";
  for (Index c = 0; c < data.dim(); ++c) out << ",x_" << (c + 1);
  out << '\n';
  for (std::size_t p = 0; p < data.paths.size(); ++p) {
    const Mat& m = data.paths[p];
    for (Index i = 0; i < m.rows(); ++i) {
      out << p << ',' << i;
      for (Index c = 0; c < m.cols(); ++c) out << ',' << fmt17(m(i, c));
      out << '\n';
    }
  }
  if (!out) throw IoError("failed while writing '" + path + "'");
}

TimeSeriesDataset read_timeseries_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) parse_fail(path, 1, "empty file");
  ++line_no;
  if (line.rfind("# h=", 0) != 0) parse_fail(path, line_no, "expected metadata line '# h=<real>'");
  TimeSeriesDataset data;
  data.h = parse_double(line.substr(4), path, line_no);

  if (!std::getline(in, line)) parse_fail(path, line_no, "missing header");
  ++line_no;
  const auto header = split_csv(line);
  if (header.size() < 3 || header[0] != "path_id" || header[1] != "step")
    parse_fail(path, line_no, "expected header path_id,step,x_1,...");
  const Index dim = static_cast<Index>(header.size()) - 2;

  std::vector<std::vector<double>> rows_by_path;
  long long current_path = -1;
  long long expected_step = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (static_cast<Index>(fields.size()) != dim + 2)
      parse_fail(path, line_no, "wrong field count");
    const long long pid = parse_int(fields[0], path, line_no);
    const long long step = parse_int(fields[1], path, line_no);
    if (pid != current_path) {
      if (pid != current_path + 1) parse_fail(path, line_no, "path ids must be 0,1,2,... in order");
      current_path = pid;
      expected_step = 0;
      rows_by_path.emplace_back();
    }
    if (step != expected_step)
      parse_fail(path, line_no, "steps within a path must increase from 0");
    ++expected_step;
    for (Index c = 0; c < dim; ++c)
      rows_by_path.back().push_back(parse_double(fields[static_cast<std::size_t>(c) + 2], path, line_no));
  }
  if (rows_by_path.empty()) parse_fail(path, line_no, "no data rows");

  for (const auto& flat : rows_by_path) {
    const Index n = static_cast<Index>(flat.size()) / dim;
    Mat m(n, dim);
    for (Index i = 0; i < n; ++i)
      for (Index c = 0; c < dim; ++c) m(i, c) = flat[static_cast<std::size_t>(i * dim + c)];
    data.paths.push_back(std::move(m));
  }
  data.validate();
  return data;
}

// ---------------------------------------------------------------------------
// Basis and estimates
// ---------------------------------------------------------------------------

namespace {

json basis_json(const BasisSet& basis) {
  json j;
  j["kind"] = to_string(basis.kind());
  j["K"] = basis.size();
  j["domain"] = {basis.r_min(), basis.r_max()};
  j["knots"] = basis.knots();
  return j;
}

BasisSet basis_from(const json& j) {
  try {
    const BasisKind kind = basis_kind_from_string(j.at("kind").get<std::string>());
    const int size = j.at("K").get<int>();
    if (kind == BasisKind::monomial) return BasisSet::monomial(size);
    const auto domain = j.at("domain").get<std::vector<double>>();
    if (domain.size() != 2) throw ParseError("basis domain must have two entries");
    return BasisSet::from_knots(kind, size, domain[0], domain[1],
                                j.at("knots").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad basis description: ") + e.what());
  }
}

}  // namespace

std::string basis_to_json(const BasisSet& basis) { return basis_json(basis).dump(2); }

BasisSet basis_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad basis json: ") + e.what());
  }
  return basis_from(j);
}

void write_basis_json(const BasisSet& basis, const std::string& path) {
  dump_json(basis_json(basis), path);
}

BasisSet read_basis_json(const std::string& path) { return basis_from(load_json(path)); }

void write_estimate_json(const ParamEstimate& estimate, const BasisSet& basis,
                         const std::string& path) {
  json j;
  j["theta"] = std::vector<double>(estimate.theta.data(),
                                   estimate.theta.data() + estimate.theta.size());
  j["method"] = estimate.method;
  j["n_samples"] = estimate.n_samples;
  j["seed"] = estimate.seed;
  j["converged"] = estimate.converged;
  j["iterations"] = estimate.iterations;
  j["note"] = estimate.note;
  j["basis"] = basis_json(basis);
  j["version"] = version();
  dump_json(j, path);
}

std::pair<ParamEstimate, BasisSet> read_estimate_json(const std::string& path) {
  const json j = load_json(path);
  try {
    ParamEstimate est;
    const auto theta = j.at("theta").get<std::vector<double>>();
    est.theta = Eigen::Map<const Vec>(theta.data(), static_cast<Index>(theta.size()));
    est.method = j.at("method").get<std::string>();
    est.n_samples = j.at("n_samples").get<std::size_t>();
    est.seed = j.at("seed").get<std::uint64_t>();
    est.converged = j.at("converged").get<bool>();
    est.iterations = j.value("iterations", 0);
    est.note = j.value("note", std::string());
    return {est, basis_from(j.at("basis"))};
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Reports, bands, curves
// ---------------------------------------------------------------------------

void write_report_csv(const ConfidenceReport& report, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "param,estimate,variance,lower,upper,method,alpha\n";
  for (Index k = 0; k < report.estimate.size(); ++k)
    out << "theta_" << (k + 1) << ',' << fmt17(report.estimate[k]) << ','
        << fmt17(report.variance[k]) << ',' << fmt17(report.lower[k]) << ','
        << fmt17(report.upper[k]) << ',' << report.method << ',' << fmt17(report.alpha) << '\n';
  if (!out) throw IoError("failed while writing '" + path + "'");
}

void write_report_json(const ConfidenceReport& report, const std::string& path) {
  json params = json::array();
  for (Index k = 0; k < report.estimate.size(); ++k) {
    json p;
    p["param"] = "theta_" + std::to_string(k + 1);
    p["estimate"] = report.estimate[k];
    p["variance"] = report.variance[k];
    p["lower"] = report.lower[k];
    p["upper"] = report.upper[k];
    params.push_back(std::move(p));
  }
  json j;
  j["method"] = report.method;
  j["alpha"] = report.alpha;
  j["params"] = std::move(params);
  j["version"] = version();
  dump_json(j, path);
}

void write_band_csv(const QoiBand& band, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "grid,lower,estimate,upper\n";
  for (Index i = 0; i < band.grid.size(); ++i)
    out << fmt17(band.grid[i]) << ',' << fmt17(band.lower[i]) << ',' << fmt17(band.estimate[i])
        << ',' << fmt17(band.upper[i]) << '\n';
  if (!out) throw IoError("failed while writing '" + path + "'");
}

void write_curve_csv(const std::string& x_name, const std::string& y_name, const Vec& x,
                     const Vec& y, const std::string& path) {
  if (x.size() != y.size()) throw ArgumentError("curve columns differ in length");
  std::ofstream out = open_out(path);
  out << x_name << ',' << y_name << '\n';
  for (Index i = 0; i < x.size(); ++i) out << fmt17(x[i]) << ',' << fmt17(y[i]) << '\n';
  if (!out) throw IoError("failed while writing '" + path + "'");
}

void write_potential_csv(const Vec& r, const Vec& u, const std::string& path) {
  if (r.size() != u.size()) throw ArgumentError("potential columns differ in length");
  std::ofstream out = open_out(path);
  out << "r,u\n";
  for (Index i = 0; i < r.size(); ++i) out << fmt17(r[i]) << ',' << fmt17(u[i]) << '\n';
  if (!out) throw IoError("failed while writing '" + path + "'");
}

void write_potential_csv(const QoiBand& band, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "r,u,lower,upper\n";
  for (Index i = 0; i < band.grid.size(); ++i)
    out << fmt17(band.grid[i]) << ',' << fmt17(band.estimate[i]) << ',' << fmt17(band.lower[i])
        << ',' << fmt17(band.upper[i]) << '\n';
  if (!out) throw IoError("failed while writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Particle snapshots
// ---------------------------------------------------------------------------

void write_pair_configs_csv(const std::vector<ParticleConfig>& configs, const std::string& path) {
  if (configs.empty()) throw ArgumentError("no configurations to write");
  std::ofstream out = open_out(path);
  out << "I,x,y,z,fx,fy,fz\n";
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const ParticleConfig& cfg = configs[c];
    cfg.validate();
    out << "# config=" << c << " box=" << fmt17(cfg.box) << '\n';
    for (Index i = 0; i < cfg.n_particles(); ++i) {
      out << i;
      for (int ax = 0; ax < 3; ++ax) out << ',' << fmt17(cfg.positions(i, ax));
      for (int ax = 0; ax < 3; ++ax) out << ',' << fmt17(cfg.forces(i, ax));
      out << '\n';
    }
  }
  if (!out) throw IoError("failed while writing '" + path + "'");
}

std::vector<ParticleConfig> read_pair_configs_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::size_t line_no = 0;

  std::vector<ParticleConfig> configs;
  std::vector<double> block;  // 6 values per particle
  double box = 0.0;
  bool in_block = false;

  auto flush_block = [&]() {
    if (!in_block) return;
    if (block.empty()) parse_fail(path, line_no, "configuration block without particles");
    const Index m = static_cast<Index>(block.size() / 6);
    ParticleConfig cfg;
    cfg.box = box;
    cfg.positions.resize(m, 3);
    cfg.forces.resize(m, 3);
    for (Index i = 0; i < m; ++i)
      for (int ax = 0; ax < 3; ++ax) {
        cfg.positions(i, ax) = block[static_cast<std::size_t>(6 * i + ax)];
        cfg.forces(i, ax) = block[static_cast<std::size_t>(6 * i + 3 + ax)];
      }
    cfg.validate();
    configs.push_back(std::move(cfg));
    block.clear();
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line == "I,x,y,z,fx,fy,fz") continue;  // optional header
    if (line.rfind("# config=", 0) == 0) {
      flush_block();
      const std::size_t box_at = line.find(" box=");
      if (box_at == std::string::npos) parse_fail(path, line_no, "block comment missing box=");
      box = parse_double(line.substr(box_at + 5), path, line_no);
      in_block = true;
      continue;
    }
    if (!in_block) parse_fail(path, line_no, "data row before any '# config=' block");
    const auto fields = split_csv(line);
    if (fields.size() != 7) parse_fail(path, line_no, "expected I,x,y,z,fx,fy,fz");
    const long long i = parse_int(fields[0], path, line_no);
    if (i != static_cast<long long>(block.size() / 6))
      parse_fail(path, line_no, "particle indices must be 0,1,2,... within a block");
    for (std::size_t f = 1; f < 7; ++f) block.push_back(parse_double(fields[f], path, line_no));
  }
  flush_block();
  if (configs.empty()) parse_fail(path, line_no, "no configuration blocks");
  return configs;
}

}  // namespace cgfit
