#include "sgn/scenarios.hpp"

#include <cmath>
#include <sstream>

#include "sgn/errors.hpp"

namespace sgn {
namespace {

constexpr std::size_t kCertifyPoints = 512;

void require_depth(double h0) {
  if (!(h0 > 0.0)) throw InvalidArgument("h0 must be positive");
}

double sech2(double y) {
  const double c = std::cosh(y);
  return 1.0 / (c * c);
}

PhysicalState solitary_state(const Grid1D& grid, double h0, double a, double c, double kappa,
                             double center) {
  const double length = grid.length();
  // Nearest periodic image keeps the profile smooth across the seam.
  auto profile = [=](double x) {
    double y = std::remainder(x - center, length);
    return h0 + a * sech2(kappa * y);
  };
  Field h = Field::from_function(grid, profile);
  Field u = h.map([=](double hv) { return c * (1.0 - h0 / hv); });
  return {std::move(h), std::move(u), 0.0};
}

}  // namespace

PhysicalState Scenario::exact_solution(const Grid1D& grid, double t) const {
  if (!exact) throw InvalidArgument("scenario '" + name + "' has no exact solution");
  return exact(grid, t);
}

Scenario still_water(double h0) {
  require_depth(h0);
  Scenario s;
  s.name = "still-water";
  s.parameters = {{"h0", h0}};
  s.default_length = 40.0 * h0;
  s.initial = [h0](const Grid1D& grid) { return PhysicalState{Field(grid, h0), Field(grid), 0.0}; };
  s.exact = [h0](const Grid1D& grid, double t) {
    return PhysicalState{Field(grid, h0), Field(grid), t};
  };
  return s;
}

Scenario gaussian_hump(double h0, double a, double width) {
  require_depth(h0);
  if (!(a > -h0)) throw InvalidArgument("gaussian amplitude must exceed -h0");
  if (!(width > 0.0)) throw InvalidArgument("gaussian width must be positive");
  if (a == 0.0) {
    Scenario s = still_water(h0);
    s.name = "gaussian";
    s.parameters = {{"a", a}, {"h0", h0}, {"width", width}};
    return s;
  }
  Scenario s;
  s.name = "gaussian";
  s.parameters = {{"a", a}, {"h0", h0}, {"width", width}};
  s.default_length = 40.0 * h0;
  s.initial = [h0, a, width](const Grid1D& grid) {
    const double length = grid.length();
    Field h = Field::from_function(grid, [=](double x) {
      const double y = std::remainder(x - 0.5 * length, length) / width;
      return h0 + a * std::exp(-y * y);
    });
    return PhysicalState{std::move(h), Field(grid), 0.0};
  };
  return s;
}

Scenario uniform_stream(double h0, double velocity) {
  require_depth(h0);
  Scenario s;
  s.name = "uniform-stream";
  s.parameters = {{"U", velocity}, {"h0", h0}};
  s.default_length = 40.0 * h0;
  s.initial = [h0, velocity](const Grid1D& grid) {
    return PhysicalState{Field(grid, h0), Field(grid, velocity), 0.0};
  };
  s.exact = [h0, velocity](const Grid1D& grid, double t) {
    return PhysicalState{Field(grid, h0), Field(grid, velocity), t};
  };
  return s;
}

SolitaryConstants solitary_constants(double h0, double a, const Params& params) {
  return {std::sqrt(params.g * (h0 + a)), std::sqrt(3.0 * a) / (2.0 * h0 * std::sqrt(h0 + a))};
}

double solitary_tail_safe_length(double h0, double a, const Params& params, double tail) {
  const double kappa = solitary_constants(h0, a, params).kappa;
  // At distance L/2 from the crest, a sech^2 ~ 4 a exp(-kappa L).
  const double needed = std::log(4.0 * a / tail) / kappa;
  return std::max(40.0 * h0, needed);
}

CertificationReport certify_solitary(double h0, double a, const Params& params, std::size_t n,
                                     double length, double threshold) {
  const auto [c, kappa] = solitary_constants(h0, a, params);
  const Grid1D grid(length, n);
  const PhysicalState s = solitary_state(grid, h0, a, c, kappa, 0.5 * length);
  const DiffOperator op(DiffKind::fourier, grid);
  const Field h_x = derivative(s.h, op);
  const Field u_x = derivative(s.u, op);
  const Field u_xx = derivative(u_x, op);
  const Field r_mass = residual_mass(s, -c * h_x, op);
  const Field r_mom = residual_momentum(s, -c * u_x, -c * u_xx, op, params);

  CertificationReport rep;
  rep.n = n;
  rep.length = length;
  rep.mass_residual = r_mass.max_abs();
  rep.momentum_residual = r_mom.max_abs();
  rep.tail_deviation = std::max(std::abs(s.h[0] - h0), std::abs(s.h[n - 1] - h0));
  rep.threshold = threshold;
  rep.passed = rep.mass_residual <= threshold && rep.momentum_residual <= threshold;
  return rep;
}

Scenario solitary_wave(double h0, double a, const Params& params, std::optional<double> x0) {
  require_depth(h0);
  params.validate();
  if (!(a > 0.0)) throw InvalidArgument("solitary amplitude must be positive");
  const auto [c, kappa] = solitary_constants(h0, a, params);
  const double cert_length = solitary_tail_safe_length(h0, a, params);
  const CertificationReport rep = certify_solitary(h0, a, params, kCertifyPoints, cert_length);
  if (!rep.passed) {
    std::ostringstream msg;
    msg.precision(3);
    msg << "solitary wave (h0=" << h0 << ", a=" << a << ") failed certification: mass residual "
        << rep.mass_residual << ", momentum residual " << rep.momentum_residual
        << " (threshold " << rep.threshold << ")";
    throw CertificationFailure(msg.str());
  }

  Scenario s;
  s.name = "solitary";
  s.parameters = {{"a", a}, {"h0", h0}};
  s.default_length = 40.0 * h0;
  const double start = x0.value_or(0.5 * s.default_length);
  s.parameters["x0"] = start;
  s.certification = rep;
  s.traveling = TravelingWave{c, -params.g * h0, start};
  const bool centered = !x0.has_value();
  s.initial = [=](const Grid1D& grid) {
    return solitary_state(grid, h0, a, c, kappa, centered ? 0.5 * grid.length() : start);
  };
  s.exact = [=](const Grid1D& grid, double t) {
    PhysicalState st =
        solitary_state(grid, h0, a, c, kappa, (centered ? 0.5 * grid.length() : start) + c * t);
    st.t = t;
    return st;
  };
  return s;
}

ZState traveling_z_t(const ZState& z, const TravelingWave& wave, const DiffOperator& op) {
  ZState zt = z_derivative(z, op);
  for (std::size_t k = 0; k < kZ; ++k) zt[k] *= -wave.speed;
  zt[kPhi] += wave.bernoulli;
  zt.phi_slope = 0.0;
  return zt;
}

Scenario make_scenario(const std::string& name, const std::map<std::string, double>& parameters,
                       const Params& params) {
  auto get = [&](const char* key, double fallback) {
    const auto it = parameters.find(key);
    return it == parameters.end() ? fallback : it->second;
  };
  auto only = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : parameters) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) throw InvalidArgument("unknown parameter '" + key + "' for scenario '" + name + "'");
    }
  };
  if (name == "still-water") {
    only({"h0"});
    return still_water(get("h0", 1.0));
  }
  if (name == "gaussian") {
    only({"h0", "a", "width"});
    return gaussian_hump(get("h0", 1.0), get("a", 0.1), get("width", 2.0));
  }
  if (name == "uniform-stream") {
    only({"h0", "U"});
    return uniform_stream(get("h0", 1.0), get("U", 0.0));
  }
  if (name == "solitary") {
    only({"h0", "a", "x0"});
    const auto it = parameters.find("x0");
    return solitary_wave(get("h0", 1.0), get("a", 0.2), params,
                         it == parameters.end() ? std::nullopt : std::optional<double>(it->second));
  }
  throw InvalidArgument("unknown scenario '" + name +
                        "' (expected still-water, gaussian, uniform-stream or solitary)");
}

}  // namespace sgn
