// Copyright 2026 The Fabrics Authors.
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

#include "fabrics/scenario.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "fabrics/errors.h"
#include "fabrics/random.h"

namespace fabrics {
namespace {

constexpr const char* kCollisionGroup = "collision_points";

// Walks a YAML document, remembering the dotted path for messages.
class Reader {
 public:
  Reader(const std::string& source, YAML::Node node, std::string path)
      : source_(source), node_(std::move(node)), path_(std::move(path)) {}

  [[noreturn]] void Fail(const std::string& message) const { Fail(node_, message); }
  [[noreturn]] void Fail(const YAML::Node& at, const std::string& message) const {
    const int line = at.IsDefined() && at.Mark().line >= 0 ? at.Mark().line + 1 : 0;
    throw ConfigError(source_, line, message);
  }

  const YAML::Node& node() const { return node_; }
  const std::string& path() const { return path_; }
  bool Has(const char* key) const { return node_[key].IsDefined() && !node_[key].IsNull(); }

  void RequireMap() const {
    if (!node_.IsMap()) Fail(fmt::format("'{}' must be a mapping", path_));
  }

  void AllowKeys(std::initializer_list<const char*> keys) const {
    RequireMap();
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
        Fail(kv.first, fmt::format("unknown key '{}' in '{}'", key, path_));
      }
    }
  }

  Reader Child(const char* key) const {
    if (!Has(key)) Fail(fmt::format("missing required field '{}'", Join(key)));
    return Reader(source_, node_[key], Join(key));
  }
  std::optional<Reader> Optional(const char* key) const {
    if (!Has(key)) return std::nullopt;
    return Reader(source_, node_[key], Join(key));
  }
  std::vector<Reader> Items() const {
    if (!node_.IsSequence()) Fail(fmt::format("'{}' must be a list", path_));
    std::vector<Reader> out;
    for (std::size_t i = 0; i < node_.size(); ++i) {
      out.emplace_back(source_, node_[i], fmt::format("{}[{}]", path_, i));
    }
    return out;
  }

  double Double() const {
    try {
      const double v = node_.as<double>();
      if (!std::isfinite(v)) Fail(fmt::format("'{}' must be finite", path_));
      return v;
    } catch (const YAML::Exception&) {
      Fail(fmt::format("'{}' must be a number", path_));
    }
  }
  long long Integer() const {
    try {
      return node_.as<long long>();
    } catch (const YAML::Exception&) {
      Fail(fmt::format("'{}' must be an integer", path_));
    }
  }
  bool Bool() const {
    try {
      return node_.as<bool>();
    } catch (const YAML::Exception&) {
      Fail(fmt::format("'{}' must be true or false", path_));
    }
  }
  std::string String() const {
    if (!node_.IsScalar()) Fail(fmt::format("'{}' must be a string", path_));
    return node_.as<std::string>();
  }
  std::vector<double> Doubles() const {
    std::vector<double> out;
    for (const Reader& r : Items()) out.push_back(r.Double());
    return out;
  }

  void Read(const char* key, double& out) const {
    if (auto r = Optional(key)) out = r->Double();
  }
  void Read(const char* key, int& out) const {
    if (auto r = Optional(key)) out = static_cast<int>(r->Integer());
  }
  void Read(const char* key, bool& out) const {
    if (auto r = Optional(key)) out = r->Bool();
  }
  void Read(const char* key, std::string& out) const {
    if (auto r = Optional(key)) out = r->String();
  }
  void Read(const char* key, std::vector<double>& out) const {
    if (auto r = Optional(key)) out = r->Doubles();
  }
  template <typename E>
  void ReadEnum(const char* key, E& out,
                std::initializer_list<std::pair<const char*, E>> names) const {
    auto r = Optional(key);
    if (!r) return;
    const std::string value = r->String();
    for (const auto& [name, e] : names) {
      if (value == name) {
        out = e;
        return;
      }
    }
    std::string allowed;
    for (const auto& [name, e] : names) allowed += (allowed.empty() ? "" : " | ") + std::string(name);
    r->Fail(fmt::format("'{}' must be one of {} (got '{}')", r->path(), allowed, value));
  }

 private:
  std::string Join(const char* key) const {
    return path_.empty() ? std::string(key) : path_ + "." + key;
  }

  const std::string& source_;
  YAML::Node node_;
  std::string path_;
};

const std::initializer_list<std::pair<const char*, DampingMode>> kModes = {
    {"speed_control", DampingMode::kSpeedControl},
    {"basic_damping", DampingMode::kBasicDamping},
    {"energized", DampingMode::kEnergized}};
const std::initializer_list<std::pair<const char*, FabricStyle>> kStyles = {
    {"geometric", FabricStyle::kGeometric}, {"lagrangian", FabricStyle::kLagrangian}};
const std::initializer_list<std::pair<const char*, BarrierMetric>> kBarrierMetrics = {
    {"velocity_gated", BarrierMetric::kVelocityGated},
    {"position_only", BarrierMetric::kPositionOnly}};
const std::initializer_list<std::pair<const char*, Channel>> kChannels = {
    {"style", Channel::kStyle}, {"geometric", Channel::kGeometric}, {"forcing", Channel::kForcing}};
const std::initializer_list<std::pair<const char*, Integrator>> kIntegrators = {
    {"rk4", Integrator::kRk4}, {"euler", Integrator::kEuler}};
const std::initializer_list<std::pair<const char*, EtaMode>> kEtaModes = {
    {"gated", EtaMode::kGated}, {"fixed", EtaMode::kFixed}};

void ReadAttractor(const Reader& r, AttractorConfig& a) {
  r.Read("target", a.target);
  r.Read("k", a.k);
  r.Read("alpha_psi", a.alpha_psi);
  r.Read("mbar", a.mbar);
  r.Read("munder", a.munder);
  r.Read("alpha_m", a.alpha_m);
}

void ReadController(const Reader& r, ControllerSpec& c) {
  r.AllowKeys({"mode", "desired_speed", "beta", "speed"});
  r.ReadEnum("mode", c.mode, kModes);
  r.Read("desired_speed", c.desired_speed);
  r.Read("beta", c.beta);
  if (auto s = r.Optional("speed")) {
    s->AllowKeys({"b_base", "b_gain", "alpha_beta", "radius", "alpha_eta", "alpha_shift",
                  "boost_gain", "epsilon", "eta_mode", "eta_fixed"});
    SpeedControlParams& p = c.speed;
    s->Read("b_base", p.b_base);
    s->Read("b_gain", p.b_gain);
    s->Read("alpha_beta", p.alpha_beta);
    s->Read("radius", p.radius);
    s->Read("alpha_eta", p.alpha_eta);
    s->Read("alpha_shift", p.alpha_shift);
    s->Read("boost_gain", p.boost_gain);
    s->Read("epsilon", p.epsilon);
    s->ReadEnum("eta_mode", p.eta_mode, kEtaModes);
    s->Read("eta_fixed", p.eta_fixed);
  }
  c.speed.exec_target = 0.5 * c.desired_speed * c.desired_speed;
}

TermConfig ReadTerm(const Reader& r, const ScenarioConfig& config) {
  r.RequireMap();
  TermConfig t;
  const std::string kind = r.Child("kind").String();
  r.Read("name", t.name);
  r.ReadEnum("channel", t.channel, kChannels);
  if (auto nodes = r.Optional("nodes")) {
    for (const Reader& n : nodes->Items()) t.nodes.push_back(n.String());
  }
  const bool arm = config.robot.kind == RobotKind::kPlanarArm;
  if (kind == "obstacle") {
    r.AllowKeys({"kind", "name", "nodes", "channel", "center", "radius", "k_b", "alpha_b"});
    ObstacleConfig o;
    o.center = r.Child("center").Doubles();
    r.Read("radius", o.radius);
    r.Read("k_b", o.k_b);
    r.Read("alpha_b", o.alpha_b);
    t.params = o;
    if (t.nodes.empty()) t.nodes = {arm ? kCollisionGroup : "root"};
  } else if (kind == "joint_limits") {
    r.AllowKeys({"kind", "name", "nodes", "channel", "lambda", "alpha"});
    JointLimitConfig j;
    r.Read("lambda", j.lambda);
    if (auto a = r.Optional("alpha")) {
      const auto v = a->Doubles();
      if (v.size() != 4) a->Fail("'alpha' of joint_limits needs 4 entries");
      j.potential = LimitPotential{v[0], v[1], v[2], v[3]};
    }
    t.params = j;
    if (t.nodes.empty()) t.nodes = {"root"};
  } else if (kind == "default_config") {
    r.AllowKeys({"kind", "name", "nodes", "channel", "q0", "lambda_dc", "k", "alpha_psi"});
    DefaultConfigConfig d;
    d.q0 = r.Child("q0").Doubles();
    r.Read("lambda_dc", d.lambda_dc);
    r.Read("k", d.k);
    r.Read("alpha_psi", d.alpha_psi);
    t.params = d;
    if (t.nodes.empty()) t.nodes = {"root"};
  } else if (kind == "attractor") {
    r.AllowKeys({"kind", "name", "nodes", "channel", "target", "k", "alpha_psi", "mbar", "munder",
                 "alpha_m"});
    AttractorConfig a;
    a.target = r.Child("target").Doubles();
    ReadAttractor(r, a);
    t.params = a;
    if (t.nodes.empty()) t.nodes = {"root"};
  } else if (kind == "cubby") {
    r.AllowKeys({"kind", "name", "nodes", "channel", "opening_center", "outward_normal", "width",
                 "depth", "target", "mbar", "munder", "alpha_m", "r_switch", "d_front",
                 "waypoint_offset", "k", "alpha_psi", "rbf_alpha_m", "extraction_potential",
                 "k_b", "alpha_b"});
    CubbyConfig c;
    c.opening_center = r.Child("opening_center").Doubles();
    c.outward_normal = r.Child("outward_normal").Doubles();
    c.target = r.Child("target").Doubles();
    r.Read("width", c.width);
    r.Read("depth", c.depth);
    CubbyParams& p = c.params;
    r.Read("mbar", p.mbar);
    r.Read("munder", p.munder);
    r.Read("alpha_m", p.alpha_m);
    r.Read("r_switch", p.r_switch);
    r.Read("d_front", p.d_front);
    r.Read("waypoint_offset", p.waypoint_offset);
    r.Read("k", p.k);
    r.Read("alpha_psi", p.alpha_psi);
    r.Read("rbf_alpha_m", p.rbf_alpha_m);
    r.Read("k_b", p.k_b);
    r.Read("alpha_b", p.alpha_b);
    if (auto a = r.Optional("extraction_potential")) {
      const auto v = a->Doubles();
      if (v.size() != 4) a->Fail("'extraction_potential' needs 4 entries");
      p.extraction_potential = LimitPotential{v[0], v[1], v[2], v[3]};
    }
    t.params = c;
    if (t.nodes.empty()) t.nodes = {"ee"};
  } else {
    r.Child("kind").Fail(fmt::format("unknown term kind '{}'", kind));
  }
  if (t.name.empty()) t.name = fmt::format("{}{}", kind, config.terms.size());
  return t;
}

ScenarioConfig ParseRoot(const Reader& root) {
  root.AllowKeys({"name", "robot", "tree", "objective", "terms", "execution_energy_scale",
                  "controller", "integrator", "convergence", "initial_states",
                  "random_initial_states", "variants", "outputs"});
  ScenarioConfig c;
  c.name = root.Child("name").String();

  const Reader robot = root.Child("robot");
  robot.AllowKeys({"kind", "dim", "link_lengths", "base_pose", "joint_limits"});
  const std::string kind = robot.Child("kind").String();
  if (kind == "particle") {
    c.robot.kind = RobotKind::kParticle;
    robot.Read("dim", c.robot.dim);
    if (robot.Has("joint_limits") || robot.Has("link_lengths")) {
      robot.Fail("particle robots take no link_lengths or joint_limits");
    }
  } else if (kind == "planar_arm") {
    c.robot.kind = RobotKind::kPlanarArm;
    c.robot.link_lengths = robot.Child("link_lengths").Doubles();
    c.robot.dim = static_cast<int>(c.robot.link_lengths.size());
    if (auto b = robot.Optional("base_pose")) {
      b->AllowKeys({"x", "y", "theta"});
      b->Read("x", c.robot.base.x);
      b->Read("y", c.robot.base.y);
      b->Read("theta", c.robot.base.theta);
    }
    const Reader limits = robot.Child("joint_limits");
    limits.AllowKeys({"lower", "upper"});
    c.robot.lower = limits.Child("lower").Doubles();
    c.robot.upper = limits.Child("upper").Doubles();
  } else {
    robot.Child("kind").Fail(fmt::format("unknown robot kind '{}'", kind));
  }

  if (auto tree = root.Optional("tree")) {
    tree->AllowKeys({"nodes", "collision_points"});
    if (auto nodes = tree->Optional("nodes")) {
      for (const Reader& n : nodes->Items()) {
        n.AllowKeys({"name", "parent", "edge"});
        NodeConfig node;
        node.name = n.Child("name").String();
        n.Read("parent", node.parent);
        const Reader e = n.Child("edge");
        e.AllowKeys({"kind", "link", "offset"});
        e.Read("kind", node.edge.kind);
        e.Read("link", node.edge.link);
        e.Read("offset", node.edge.offset);
        if (node.edge.kind != "body_point" && node.edge.kind != "identity") {
          e.Fail(fmt::format("unknown edge kind '{}'", node.edge.kind));
        }
        c.nodes.push_back(node);
      }
    }
    if (auto cps = tree->Optional("collision_points")) {
      for (const Reader& p : cps->Items()) {
        p.AllowKeys({"link", "offset"});
        BodyPoint bp;
        p.Read("link", bp.link);
        p.Read("offset", bp.offset);
        c.collision_points.push_back(bp);
      }
    }
  }

  const Reader objective = root.Child("objective");
  objective.AllowKeys({"node", "target", "k", "alpha_psi", "mbar", "munder", "alpha_m"});
  objective.Read("node", c.objective.node);
  c.objective.attractor.target = objective.Child("target").Doubles();
  ReadAttractor(objective, c.objective.attractor);

  if (auto terms = root.Optional("terms")) {
    for (const Reader& t : terms->Items()) c.terms.push_back(ReadTerm(t, c));
  }
  root.Read("execution_energy_scale", c.execution_energy_scale);

  if (auto ctl = root.Optional("controller")) ReadController(*ctl, c.controller);
  c.controller.speed.exec_target = 0.5 * c.controller.desired_speed * c.controller.desired_speed;

  if (auto integ = root.Optional("integrator")) {
    integ->AllowKeys({"method", "dt", "duration"});
    integ->ReadEnum("method", c.integrator.method, kIntegrators);
    integ->Read("dt", c.integrator.dt);
    integ->Read("duration", c.integrator.duration);
  }
  if (auto conv = root.Optional("convergence")) {
    conv->AllowKeys({"pos_tol", "vel_tol", "window"});
    conv->Read("pos_tol", c.convergence.pos_tol);
    conv->Read("vel_tol", c.convergence.vel_tol);
    conv->Read("window", c.convergence.window);
  }
  if (auto states = root.Optional("initial_states")) {
    for (const Reader& s : states->Items()) {
      s.AllowKeys({"q", "qd"});
      InitialState st;
      st.q = s.Child("q").Doubles();
      st.qd.assign(st.q.size(), 0.0);
      s.Read("qd", st.qd);
      c.initial_states.push_back(st);
    }
  }
  if (auto rnd = root.Optional("random_initial_states")) {
    rnd->AllowKeys({"count", "seed", "q_lower", "q_upper", "max_speed"});
    RandomStates rs;
    rs.count = static_cast<int>(rnd->Child("count").Integer());
    const long long seed = rnd->Child("seed").Integer();
    if (seed < 0) rnd->Fail("'random_initial_states.seed' must be >= 0");
    rs.seed = static_cast<std::uint64_t>(seed);
    rs.q_lower = rnd->Child("q_lower").Doubles();
    rs.q_upper = rnd->Child("q_upper").Doubles();
    rnd->Read("max_speed", rs.max_speed);
    c.random_states = rs;
  }
  if (auto variants = root.Optional("variants")) {
    for (const Reader& v : variants->Items()) {
      v.AllowKeys({"name", "style", "barrier_metric", "controller"});
      VariantConfig var;
      var.name = v.Child("name").String();
      v.ReadEnum("style", var.style, kStyles);
      v.ReadEnum("barrier_metric", var.barrier_metric, kBarrierMetrics);
      var.controller = c.controller;
      if (auto ctl = v.Optional("controller")) ReadController(*ctl, var.controller);
      c.variants.push_back(var);
    }
  }
  if (c.variants.empty()) {
    VariantConfig var;
    var.name = "default";
    var.controller = c.controller;
    c.variants.push_back(var);
  }
  if (auto out = root.Optional("outputs")) {
    out->AllowKeys({"csv", "dat", "svg"});
    out->Read("csv", c.outputs.csv);
    out->Read("dat", c.outputs.dat);
    out->Read("svg", c.outputs.svg);
  }
  return c;
}

[[noreturn]] void Invalid(const std::string& source, const std::string& message) {
  throw ConfigError(source, 0, message);
}

void CheckSize(const std::string& source, const std::vector<double>& v, std::size_t n,
               const std::string& what) {
  if (v.size() != n) {
    Invalid(source, fmt::format("'{}' has {} entries, expected {}", what, v.size(), n));
  }
}

// Emission helpers. Doubles use the shortest text that reads back exactly.
std::string Num(double v) { return fmt::format("{}", v); }

void EmitDoubles(YAML::Emitter& out, const std::vector<double>& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (double x : v) out << Num(x);
  out << YAML::EndSeq;
}

void EmitAttractorFields(YAML::Emitter& out, const AttractorConfig& a) {
  out << YAML::Key << "target" << YAML::Value;
  EmitDoubles(out, a.target);
  out << YAML::Key << "k" << YAML::Value << Num(a.k);
  out << YAML::Key << "alpha_psi" << YAML::Value << Num(a.alpha_psi);
  out << YAML::Key << "mbar" << YAML::Value << Num(a.mbar);
  out << YAML::Key << "munder" << YAML::Value << Num(a.munder);
  out << YAML::Key << "alpha_m" << YAML::Value << Num(a.alpha_m);
}

template <typename E>
const char* NameOf(E value, std::initializer_list<std::pair<const char*, E>> names) {
  for (const auto& [name, e] : names) {
    if (e == value) return name;
  }
  return "?";
}

void EmitController(YAML::Emitter& out, const ControllerSpec& c) {
  const SpeedControlParams& p = c.speed;
  out << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << NameOf(c.mode, kModes);
  out << YAML::Key << "desired_speed" << YAML::Value << Num(c.desired_speed);
  out << YAML::Key << "beta" << YAML::Value << Num(c.beta);
  out << YAML::Key << "speed" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "b_base" << YAML::Value << Num(p.b_base);
  out << YAML::Key << "b_gain" << YAML::Value << Num(p.b_gain);
  out << YAML::Key << "alpha_beta" << YAML::Value << Num(p.alpha_beta);
  out << YAML::Key << "radius" << YAML::Value << Num(p.radius);
  out << YAML::Key << "alpha_eta" << YAML::Value << Num(p.alpha_eta);
  out << YAML::Key << "alpha_shift" << YAML::Value << Num(p.alpha_shift);
  out << YAML::Key << "boost_gain" << YAML::Value << Num(p.boost_gain);
  out << YAML::Key << "epsilon" << YAML::Value << Num(p.epsilon);
  out << YAML::Key << "eta_mode" << YAML::Value << NameOf(p.eta_mode, kEtaModes);
  out << YAML::Key << "eta_fixed" << YAML::Value << Num(p.eta_fixed);
  out << YAML::EndMap;
  out << YAML::EndMap;
}

void EmitTerm(YAML::Emitter& out, const TermConfig& t) {
  out << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << std::string(t.kind());
  out << YAML::Key << "name" << YAML::Value << t.name;
  out << YAML::Key << "nodes" << YAML::Value << YAML::Flow << t.nodes;
  out << YAML::Key << "channel" << YAML::Value << NameOf(t.channel, kChannels);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ObstacleConfig>) {
          out << YAML::Key << "center" << YAML::Value;
          EmitDoubles(out, p.center);
          out << YAML::Key << "radius" << YAML::Value << Num(p.radius);
          out << YAML::Key << "k_b" << YAML::Value << Num(p.k_b);
          out << YAML::Key << "alpha_b" << YAML::Value << Num(p.alpha_b);
        } else if constexpr (std::is_same_v<T, JointLimitConfig>) {
          out << YAML::Key << "lambda" << YAML::Value << Num(p.lambda);
          out << YAML::Key << "alpha" << YAML::Value;
          EmitDoubles(out, {p.potential.alpha1, p.potential.alpha2, p.potential.alpha3,
                            p.potential.alpha4});
        } else if constexpr (std::is_same_v<T, DefaultConfigConfig>) {
          out << YAML::Key << "q0" << YAML::Value;
          EmitDoubles(out, p.q0);
          out << YAML::Key << "lambda_dc" << YAML::Value << Num(p.lambda_dc);
          out << YAML::Key << "k" << YAML::Value << Num(p.k);
          out << YAML::Key << "alpha_psi" << YAML::Value << Num(p.alpha_psi);
        } else if constexpr (std::is_same_v<T, AttractorConfig>) {
          EmitAttractorFields(out, p);
        } else if constexpr (std::is_same_v<T, CubbyConfig>) {
          const CubbyParams& c = p.params;
          out << YAML::Key << "opening_center" << YAML::Value;
          EmitDoubles(out, p.opening_center);
          out << YAML::Key << "outward_normal" << YAML::Value;
          EmitDoubles(out, p.outward_normal);
          out << YAML::Key << "width" << YAML::Value << Num(p.width);
          out << YAML::Key << "depth" << YAML::Value << Num(p.depth);
          out << YAML::Key << "target" << YAML::Value;
          EmitDoubles(out, p.target);
          out << YAML::Key << "mbar" << YAML::Value << Num(c.mbar);
          out << YAML::Key << "munder" << YAML::Value << Num(c.munder);
          out << YAML::Key << "alpha_m" << YAML::Value << Num(c.alpha_m);
          out << YAML::Key << "r_switch" << YAML::Value << Num(c.r_switch);
          out << YAML::Key << "d_front" << YAML::Value << Num(c.d_front);
          out << YAML::Key << "waypoint_offset" << YAML::Value << Num(c.waypoint_offset);
          out << YAML::Key << "k" << YAML::Value << Num(c.k);
          out << YAML::Key << "alpha_psi" << YAML::Value << Num(c.alpha_psi);
          out << YAML::Key << "rbf_alpha_m" << YAML::Value << Num(c.rbf_alpha_m);
          out << YAML::Key << "extraction_potential" << YAML::Value;
          const LimitPotential& e = c.extraction_potential;
          EmitDoubles(out, {e.alpha1, e.alpha2, e.alpha3, e.alpha4});
          out << YAML::Key << "k_b" << YAML::Value << Num(c.k_b);
          out << YAML::Key << "alpha_b" << YAML::Value << Num(c.alpha_b);
        }
      },
      t.params);
  out << YAML::EndMap;
}

}  // namespace

std::string_view TermConfig::kind() const {
  switch (params.index()) {
    case 0:
      return "attractor";
    case 1:
      return "obstacle";
    case 2:
      return "joint_limits";
    case 3:
      return "default_config";
    default:
      return "cubby";
  }
}

int ScenarioConfig::dim() const { return robot.dim; }

std::vector<InitialState> ScenarioConfig::AllInitialStates() const {
  std::vector<InitialState> out = initial_states;
  if (random_states && random_states->count > 0) {
    Sampler sampler(random_states->seed);
    const int n = dim();
    for (int i = 0; i < random_states->count; ++i) {
      InitialState s;
      for (int j = 0; j < n; ++j) {
        s.q.push_back(sampler.Uniform(random_states->q_lower[j], random_states->q_upper[j]));
      }
      for (int j = 0; j < n; ++j) {
        s.qd.push_back(sampler.Uniform(-random_states->max_speed, random_states->max_speed));
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

const VariantConfig* ScenarioConfig::FindVariant(const std::string& name) const {
  for (const VariantConfig& v : variants) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

ScenarioConfig ParseScenario(const std::string& text, const std::string& source) {
  YAML::Node doc;
  try {
    doc = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source, e.mark.line >= 0 ? e.mark.line + 1 : 0,
                      fmt::format("parse error: {}", e.msg));
  }
  if (!doc.IsMap()) throw ConfigError(source, 1, "scenario must be a mapping");
  ScenarioConfig config = ParseRoot(Reader(source, doc, ""));
  ValidateScenario(config, source);
  return config;
}

ScenarioConfig LoadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open scenario file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseScenario(buffer.str(), path);
}

void ValidateScenario(const ScenarioConfig& c, const std::string& source) {
  if (c.name.empty()) Invalid(source, "'name' must not be empty");
  const int n = c.dim();
  const bool arm = c.robot.kind == RobotKind::kPlanarArm;
  if (n <= 0) Invalid(source, "robot dimension must be positive");
  if (arm) {
    if (c.robot.link_lengths.empty()) Invalid(source, "'robot.link_lengths' must not be empty");
    for (double l : c.robot.link_lengths) {
      if (!(l > 0.0)) Invalid(source, "'robot.link_lengths' entries must be > 0");
    }
    CheckSize(source, c.robot.lower, n, "robot.joint_limits.lower");
    CheckSize(source, c.robot.upper, n, "robot.joint_limits.upper");
    for (int j = 0; j < n; ++j) {
      if (!(c.robot.lower[j] < c.robot.upper[j])) {
        Invalid(source, fmt::format("joint {} has lower limit >= upper limit", j));
      }
    }
  }

  // Node references, in declaration order.
  std::set<std::string> known = {"root"};
  std::map<std::string, int> dims = {{"root", n}};
  for (const NodeConfig& node : c.nodes) {
    if (node.name.empty() || node.name == "root" || node.name == kCollisionGroup) {
      Invalid(source, fmt::format("invalid node name '{}'", node.name));
    }
    if (known.count(node.name)) Invalid(source, fmt::format("duplicate node '{}'", node.name));
    if (!known.count(node.parent)) {
      Invalid(source, fmt::format("node '{}' refers to unknown parent '{}'", node.name,
                                  node.parent));
    }
    if (node.edge.kind == "body_point") {
      if (!arm || node.parent != "root") {
        Invalid(source, fmt::format("body_point edge of '{}' needs an arm root parent", node.name));
      }
      if (node.edge.link < 0 || node.edge.link >= n || node.edge.offset < 0.0 ||
          node.edge.offset > 1.0) {
        Invalid(source, fmt::format("body_point edge of '{}' is out of range", node.name));
      }
      dims[node.name] = 2;
    } else {
      dims[node.name] = dims[node.parent];
    }
    known.insert(node.name);
  }
  for (const BodyPoint& bp : c.collision_points) {
    if (!arm || bp.link < 0 || bp.link >= n || bp.offset < 0.0 || bp.offset > 1.0) {
      Invalid(source, "collision point out of range");
    }
  }
  auto node_dim = [&](const std::string& name) -> int {
    if (name == kCollisionGroup) {
      if (!arm) Invalid(source, "'collision_points' is only available for arms");
      return 2;
    }
    if (!known.count(name)) Invalid(source, fmt::format("unknown node '{}'", name));
    return dims[name];
  };

  const int objective_dim = node_dim(c.objective.node);
  CheckSize(source, c.objective.attractor.target, objective_dim, "objective.target");

  std::set<std::string> term_names;
  for (const TermConfig& t : c.terms) {
    if (!term_names.insert(t.name).second) {
      Invalid(source, fmt::format("duplicate term name '{}'", t.name));
    }
    if (t.nodes.empty()) Invalid(source, fmt::format("term '{}' has no nodes", t.name));
    for (const std::string& node : t.nodes) {
      const int d = node_dim(node);
      std::visit(
          [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ObstacleConfig>) {
              CheckSize(source, p.center, d, t.name + ".center");
              if (!(p.radius > 0.0)) Invalid(source, t.name + ".radius must be > 0");
            } else if constexpr (std::is_same_v<T, AttractorConfig>) {
              CheckSize(source, p.target, d, t.name + ".target");
            } else if constexpr (std::is_same_v<T, DefaultConfigConfig>) {
              CheckSize(source, p.q0, d, t.name + ".q0");
            } else if constexpr (std::is_same_v<T, JointLimitConfig>) {
              if (!arm || node != "root") {
                Invalid(source, fmt::format("joint_limits term '{}' needs an arm root", t.name));
              }
            } else if constexpr (std::is_same_v<T, CubbyConfig>) {
              if (d != 2) Invalid(source, fmt::format("cubby term '{}' needs a 2-D node", t.name));
              CheckSize(source, p.opening_center, 2, t.name + ".opening_center");
              CheckSize(source, p.outward_normal, 2, t.name + ".outward_normal");
              CheckSize(source, p.target, 2, t.name + ".target");
            }
          },
          t.params);
    }
  }

  c.integrator.Validate();
  if (c.convergence.window < 1) Invalid(source, "'convergence.window' must be >= 1");
  if (!(c.execution_energy_scale > 0.0)) Invalid(source, "'execution_energy_scale' must be > 0");
  const auto states = c.AllInitialStates();
  if (c.random_states) {
    CheckSize(source, c.random_states->q_lower, n, "random_initial_states.q_lower");
    CheckSize(source, c.random_states->q_upper, n, "random_initial_states.q_upper");
    if (c.random_states->count < 0) Invalid(source, "random state count must be >= 0");
  }
  if (states.empty()) Invalid(source, "scenario has no initial states");
  for (std::size_t i = 0; i < c.initial_states.size(); ++i) {
    CheckSize(source, c.initial_states[i].q, n, fmt::format("initial_states[{}].q", i));
    CheckSize(source, c.initial_states[i].qd, n, fmt::format("initial_states[{}].qd", i));
  }
  std::set<std::string> variant_names;
  for (const VariantConfig& v : c.variants) {
    if (!variant_names.insert(v.name).second) {
      Invalid(source, fmt::format("duplicate variant '{}'", v.name));
    }
    try {
      if (v.controller.mode == DampingMode::kSpeedControl) v.controller.speed.Validate();
    } catch (const InvalidValueError& e) {
      Invalid(source, fmt::format("variant '{}': {}", v.name, e.what()));
    }
    if (v.controller.mode == DampingMode::kBasicDamping && !(v.controller.beta > 0.0)) {
      Invalid(source, fmt::format("variant '{}': basic damping needs beta > 0", v.name));
    }
  }
}

std::string EchoScenario(const ScenarioConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << c.name;

  out << YAML::Key << "robot" << YAML::Value << YAML::BeginMap;
  if (c.robot.kind == RobotKind::kParticle) {
    out << YAML::Key << "kind" << YAML::Value << "particle";
    out << YAML::Key << "dim" << YAML::Value << c.robot.dim;
  } else {
    out << YAML::Key << "kind" << YAML::Value << "planar_arm";
    out << YAML::Key << "link_lengths" << YAML::Value;
    EmitDoubles(out, c.robot.link_lengths);
    out << YAML::Key << "base_pose" << YAML::Value << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "x" << YAML::Value << Num(c.robot.base.x);
    out << YAML::Key << "y" << YAML::Value << Num(c.robot.base.y);
    out << YAML::Key << "theta" << YAML::Value << Num(c.robot.base.theta);
    out << YAML::EndMap;
    out << YAML::Key << "joint_limits" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "lower" << YAML::Value;
    EmitDoubles(out, c.robot.lower);
    out << YAML::Key << "upper" << YAML::Value;
    EmitDoubles(out, c.robot.upper);
    out << YAML::EndMap;
  }
  out << YAML::EndMap;

  out << YAML::Key << "tree" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "nodes" << YAML::Value << YAML::BeginSeq;
  for (const NodeConfig& n : c.nodes) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << n.name;
    out << YAML::Key << "parent" << YAML::Value << n.parent;
    out << YAML::Key << "edge" << YAML::Value << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << n.edge.kind;
    out << YAML::Key << "link" << YAML::Value << n.edge.link;
    out << YAML::Key << "offset" << YAML::Value << Num(n.edge.offset);
    out << YAML::EndMap;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "collision_points" << YAML::Value << YAML::BeginSeq;
  for (const BodyPoint& bp : c.collision_points) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "link" << YAML::Value << bp.link;
    out << YAML::Key << "offset" << YAML::Value << Num(bp.offset);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;

  out << YAML::Key << "objective" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "node" << YAML::Value << c.objective.node;
  EmitAttractorFields(out, c.objective.attractor);
  out << YAML::EndMap;

  out << YAML::Key << "terms" << YAML::Value << YAML::BeginSeq;
  for (const TermConfig& t : c.terms) EmitTerm(out, t);
  out << YAML::EndSeq;
  out << YAML::Key << "execution_energy_scale" << YAML::Value << Num(c.execution_energy_scale);

  out << YAML::Key << "controller" << YAML::Value;
  EmitController(out, c.controller);

  out << YAML::Key << "integrator" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "method" << YAML::Value << NameOf(c.integrator.method, kIntegrators);
  out << YAML::Key << "dt" << YAML::Value << Num(c.integrator.dt);
  out << YAML::Key << "duration" << YAML::Value << Num(c.integrator.duration);
  out << YAML::EndMap;

  out << YAML::Key << "convergence" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "pos_tol" << YAML::Value << Num(c.convergence.pos_tol);
  out << YAML::Key << "vel_tol" << YAML::Value << Num(c.convergence.vel_tol);
  out << YAML::Key << "window" << YAML::Value << c.convergence.window;
  out << YAML::EndMap;

  out << YAML::Key << "initial_states" << YAML::Value << YAML::BeginSeq;
  for (const InitialState& s : c.initial_states) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "q" << YAML::Value;
    EmitDoubles(out, s.q);
    out << YAML::Key << "qd" << YAML::Value;
    EmitDoubles(out, s.qd);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  if (c.random_states) {
    const RandomStates& r = *c.random_states;
    out << YAML::Key << "random_initial_states" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "count" << YAML::Value << r.count;
    out << YAML::Key << "seed" << YAML::Value << r.seed;
    out << YAML::Key << "q_lower" << YAML::Value;
    EmitDoubles(out, r.q_lower);
    out << YAML::Key << "q_upper" << YAML::Value;
    EmitDoubles(out, r.q_upper);
    out << YAML::Key << "max_speed" << YAML::Value << Num(r.max_speed);
    out << YAML::EndMap;
  }

  out << YAML::Key << "variants" << YAML::Value << YAML::BeginSeq;
  for (const VariantConfig& v : c.variants) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << v.name;
    out << YAML::Key << "style" << YAML::Value << NameOf(v.style, kStyles);
    out << YAML::Key << "barrier_metric" << YAML::Value
        << NameOf(v.barrier_metric, kBarrierMetrics);
    out << YAML::Key << "controller" << YAML::Value;
    EmitController(out, v.controller);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "outputs" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "csv" << YAML::Value << c.outputs.csv;
  out << YAML::Key << "dat" << YAML::Value << c.outputs.dat;
  out << YAML::Key << "svg" << YAML::Value << c.outputs.svg;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::string_view StyleName(FabricStyle style) { return NameOf(style, kStyles); }
std::string_view ModeName(DampingMode mode) { return NameOf(mode, kModes); }
std::string_view BarrierMetricName(BarrierMetric metric) {
  return NameOf(metric, kBarrierMetrics);
}

}  // namespace fabrics
