#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "cgfit/dataset.hpp"
#include "cgfit/errors.hpp"
#include "cgfit/io.hpp"
#include "cgfit/pairfm.hpp"

using namespace cgfit;

namespace {

// Unique scratch path per test file; removed eagerly.
struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("io_scratch_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

IidDataset small_iid() {
  IidDataset data;
  data.states.resize(3, 2);
  data.states << 0.1, -0.5, 1.25, 2.0, -3.5, 0.0;
  data.cg_forces.resize(3, 1);
  data.cg_forces << 10.0, -0.125, 0.75;
  data.label = "scratch";
  return data;
}

}  // namespace

TEST_CASE("iid dataset validation") {
  IidDataset data = small_iid();
  CHECK_NOTHROW(data.validate());
  CHECK(data.size() == 3);
  CHECK(data.dim() == 2);
  CHECK(data.has_forces());

  SUBCASE("force row mismatch") {
    data.cg_forces.resize(2, 1);
    CHECK_THROWS_AS(data.validate(), ArgumentError);
  }
  SUBCASE("non-finite entry") {
    data.states(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(data.validate(), ArgumentError);
  }
  SUBCASE("empty") {
    data.states.resize(0, 2);
    data.cg_forces.resize(0, 1);
    CHECK_THROWS_AS(data.validate(), ArgumentError);
  }
}

TEST_CASE("time series validation") {
  TimeSeriesDataset ts;
  ts.h = 0.01;
  ts.paths.push_back(Mat::Zero(5, 2));
  ts.paths.push_back(Mat::Ones(3, 2));
  CHECK_NOTHROW(ts.validate());
  CHECK(ts.n_paths() == 2);
  CHECK(ts.n_transitions() == 4 + 2);

  SUBCASE("bad step") {
    ts.h = 0.0;
    CHECK_THROWS_AS(ts.validate(), ArgumentError);
  }
  SUBCASE("dimension mismatch across paths") {
    ts.paths.push_back(Mat::Zero(4, 3));
    CHECK_THROWS_AS(ts.validate(), ArgumentError);
  }
  SUBCASE("single-record path") {
    ts.paths.push_back(Mat::Zero(1, 2));
    CHECK_THROWS_AS(ts.validate(), ArgumentError);
  }
}

TEST_CASE("coarse-graining maps") {
  SUBCASE("selection keeps chosen coordinates") {
    const CgMap map = CgMap::selection({0}, 2);
    IidDataset data = small_iid();
    const IidDataset cg = cg_project(data, map);
    CHECK(cg.dim() == 1);
    CHECK(cg.states(0, 0) == doctest::Approx(0.1));
    CHECK(cg.states(2, 0) == doctest::Approx(-3.5));
    // Forces ride along unchanged: they are already the coarse forces.
    CHECK(cg.cg_forces(0, 0) == doctest::Approx(10.0));
  }

  SUBCASE("weight matrix averages coordinates") {
    Mat w(1, 2);
    w << 0.5, 0.5;
    const CgMap map = CgMap::matrix(w);
    IidDataset data = small_iid();
    const IidDataset cg = cg_project(data, map);
    CHECK(cg.states(0, 0) == doctest::Approx(0.5 * (0.1 - 0.5)));
  }

  SUBCASE("time series projection") {
    TimeSeriesDataset ts;
    ts.h = 0.5;
    Mat path(3, 2);
    path << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0;
    ts.paths.push_back(path);
    const TimeSeriesDataset cg = cg_project(ts, CgMap::selection({1}, 2));
    CHECK(cg.h == doctest::Approx(0.5));
    CHECK(cg.paths[0](2, 0) == doctest::Approx(6.0));
  }

  SUBCASE("rejects negative weights and empty rows") {
    Mat neg(1, 2);
    neg << 1.0, -0.25;
    CHECK_THROWS_AS(CgMap::matrix(neg), ArgumentError);
    Mat zero = Mat::Zero(1, 2);
    CHECK_THROWS_AS(CgMap::matrix(zero), ArgumentError);
  }

  SUBCASE("selection bounds checked") {
    CHECK_THROWS_AS(CgMap::selection({2}, 2), ArgumentError);
  }
}

TEST_CASE("iid csv round trip preserves 17-digit values") {
  TempFile tmp("iid.csv");
  const IidDataset data = small_iid();
  write_iid_csv(data, tmp.path);
  const IidDataset back = read_iid_csv(tmp.path);
  REQUIRE(back.size() == data.size());
  REQUIRE(back.dim() == data.dim());
  REQUIRE(back.has_forces());
  CHECK((back.states - data.states).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.cg_forces - data.cg_forces).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("iid csv without forces") {
  TempFile tmp("iid_nof.csv");
  IidDataset data = small_iid();
  data.cg_forces.resize(0, 0);
  write_iid_csv(data, tmp.path);
  const IidDataset back = read_iid_csv(tmp.path);
  CHECK_FALSE(back.has_forces());
  CHECK(back.states(1, 1) == doctest::Approx(2.0));
}

TEST_CASE("iid csv rejects malformed content") {
  TempFile tmp("bad.csv");
  SUBCASE("missing file") { CHECK_THROWS_AS(read_iid_csv("no_such_file.csv"), IoError); }
  SUBCASE("bad header") {
    std::ofstream(tmp.path) << "a,b\n1,2\n";
    CHECK_THROWS_AS(read_iid_csv(tmp.path), ParseError);
  }
  SUBCASE("ragged row") {
    std::ofstream(tmp.path) << "x_1,x_2\n1.0,2.0\n3.0\n";
    CHECK_THROWS_AS(read_iid_csv(tmp.path), ParseError);
  }
  SUBCASE("non-numeric field") {
    std::ofstream(tmp.path) << "x_1\n1.0\nbogus\n";
    CHECK_THROWS_AS(read_iid_csv(tmp.path), ParseError);
  }
}

TEST_CASE("time series csv round trip") {
  TempFile tmp("ts.csv");
  TimeSeriesDataset ts;
  ts.h = 0.01;
  Mat p0(3, 2), p1(2, 2);
  p0 << 0.0, 1.0, 0.125, -1.0, 0.25, 0.5;
  p1 << -1.0, 0.0, -0.875, 0.25;
  ts.paths = {p0, p1};
  write_timeseries_csv(ts, tmp.path);
  const TimeSeriesDataset back = read_timeseries_csv(tmp.path);
  REQUIRE(back.n_paths() == 2);
  CHECK(back.h == 0.01);
  CHECK((back.paths[0] - p0).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.paths[1] - p1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("time series csv rejects out-of-order records") {
  TempFile tmp("ts_bad.csv");
  std::ofstream(tmp.path) << "# h=0.01\npath_id,step,x_1\n0,0,1.0\n0,2,2.0\n";
  CHECK_THROWS_AS(read_timeseries_csv(tmp.path), ParseError);
}

TEST_CASE("basis json round trip") {
  TempFile tmp("basis.json");
  SUBCASE("monomial") {
    const BasisSet b = BasisSet::monomial(5);
    write_basis_json(b, tmp.path);
    CHECK(read_basis_json(tmp.path) == b);
  }
  SUBCASE("cubic spline keeps exact knots") {
    const BasisSet b = BasisSet::cubic_bspline(12, 0.35, 1.4);
    write_basis_json(b, tmp.path);
    CHECK(read_basis_json(tmp.path) == b);
  }
}

TEST_CASE("estimate json round trip") {
  TempFile tmp("estimate.json");
  ParamEstimate est;
  est.theta = Vec::LinSpaced(5, -1.0, 1.0);
  est.theta[2] = 0.1234567890123456789;  // force a 17-digit payload
  est.method = "fm-iid";
  est.n_samples = 500;
  est.seed = 987654321;
  est.converged = true;
  est.iterations = 7;
  est.note = "demo";
  const BasisSet basis = BasisSet::monomial(5);
  write_estimate_json(est, basis, tmp.path);
  const auto [back, basis_back] = read_estimate_json(tmp.path);
  CHECK(basis_back == basis);
  CHECK(back.method == est.method);
  CHECK(back.n_samples == est.n_samples);
  CHECK(back.seed == est.seed);
  CHECK(back.converged == est.converged);
  CHECK(back.iterations == est.iterations);
  CHECK(back.note == est.note);
  CHECK((back.theta - est.theta).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pair configuration csv round trip") {
  TempFile tmp("pairs.csv");
  std::vector<ParticleConfig> configs(2);
  for (int c = 0; c < 2; ++c) {
    configs[c].box = 5.0 + c;
    configs[c].positions.resize(3, 3);
    configs[c].forces.resize(3, 3);
    for (Index i = 0; i < 3; ++i)
      for (Index ax = 0; ax < 3; ++ax) {
        configs[c].positions(i, ax) = 0.1 * static_cast<double>(i + 1) + 0.01 * ax + c;
        configs[c].forces(i, ax) = -0.5 * static_cast<double>(i) + 0.25 * ax - c;
      }
  }
  write_pair_configs_csv(configs, tmp.path);
  const auto back = read_pair_configs_csv(tmp.path);
  REQUIRE(back.size() == 2);
  for (int c = 0; c < 2; ++c) {
    CHECK(back[c].box == configs[c].box);
    CHECK((back[c].positions - configs[c].positions).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back[c].forces - configs[c].forces).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("pair configuration csv rejects bad particle indices") {
  TempFile tmp("pairs_bad.csv");
  std::ofstream(tmp.path) << "I,x,y,z,fx,fy,fz\n# config=0 box=5\n0,0,0,0,0,0,0\n2,1,1,1,0,0,0\n";
  CHECK_THROWS_AS(read_pair_configs_csv(tmp.path), ParseError);
}
