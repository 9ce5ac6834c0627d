#include <doctest.h>

#include <string>

#include "vasc/config.hpp"
#include "vasc/errors.hpp"

using namespace vasc;

namespace {
std::string error_of(const std::string& text) {
  try {
    parse_config(text).validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}
}  // namespace

TEST_CASE("empty config is the canonical set") {
  const ExperimentConfig c = parse_config("");
  CHECK(c == ExperimentConfig{});
  CHECK(c.model().mu == 1.0);
  CHECK(stability_check(c.model(), c.equilibrium()).sigma == doctest::Approx(1.0));
}

TEST_CASE("parse, serialize, parse is the identity") {
  const std::string text = R"(# comment
[model]
mu = 0.7
alpha = 1.3
pressure.kind = power
pressure.K = 1.1
pressure.gamma = 1.4
[grid]
dim = 3
n = 32
length = 50
[time]
dt = 0.01
scheme = imex_bdf2
[init]
rho.amplitude = 0.02
rho.width = 2.5
rho.center = 1, 2, 3
u_y.amplitude = 0.001
seed = 42
[analysis]
q = 2, 4, inf
fit.lo = 20
[output]
out_dir = results ; trailing comment
)";
  const ExperimentConfig c = parse_config(text);
  CHECK(c.mu == 0.7);
  CHECK(c.pressure_kind == "power");
  CHECK(c.rho.center == std::array<double, 3>{1, 2, 3});
  CHECK(c.q.size() == 3);
  CHECK(c.out_dir == "results");
  CHECK(c.seed == 42);
  const ExperimentConfig c2 = parse_config(serialize_config(c));
  CHECK(c2 == c);
  CHECK(serialize_config(c2) == serialize_config(c));
  CHECK(config_hash(c2) == config_hash(c));
  CHECK(config_hash(c).size() == 16);
  ExperimentConfig c3 = c;
  c3.dt = 0.02;
  CHECK(config_hash(c3) != config_hash(c));
}

TEST_CASE("doubles survive the round trip bit for bit") {
  ExperimentConfig c;
  c.mu = 0.1 + 0.2;
  c.length = 1.0 / 3.0;
  c.fit_hi = 123.456789012345678;
  CHECK(parse_config(serialize_config(c)) == c);
}

TEST_CASE("errors name the offending key") {
  CHECK(error_of("[model]\nmu = abc\n").find("model.mu") != std::string::npos);
  CHECK(error_of("[model]\nnu = 1\n").find("line 2") != std::string::npos);
  CHECK(error_of("[nosuch]\n").find("nosuch") != std::string::npos);
  CHECK(error_of("[grid]\nn = 100\n").find("grid.n") != std::string::npos);
  CHECK(error_of("[time]\ndt = -1\n").find("time.dt") != std::string::npos);
  CHECK(error_of("[time]\nscheme = euler\n").find("time.scheme") != std::string::npos);
  CHECK(error_of("mu = 1\n") != "");
  CHECK(error_of("[model]\nmu\n") != "");
}
