#include "dualarm/scenario.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "dualarm/errors.hpp"

namespace dualarm {

namespace {

using nlohmann::json;

/// A json node together with its path, for diagnostics.
class Node {
 public:
  Node(const json& value, std::string path) : value_(&value), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return *value_; }

  [[noreturn]] void fail(const std::string& what) const { throw LoadError(path_, what); }

  bool has(const std::string& key) const {
    return value_->is_object() && value_->contains(key);
  }

  Node at(const std::string& key) const {
    if (!value_->is_object()) fail("expected an object");
    auto it = value_->find(key);
    if (it == value_->end()) throw LoadError(path_ + "." + key, "missing field");
    return Node(*it, path_ + "." + key);
  }

  Node at(std::size_t i) const {
    return Node((*value_)[i], path_ + "[" + std::to_string(i) + "]");
  }

  std::size_t size() const {
    if (!value_->is_array()) fail("expected an array");
    return value_->size();
  }

  double number() const {
    if (!value_->is_number()) fail("expected a number");
    return value_->get<double>();
  }

  std::size_t count() const {
    if (!value_->is_number_unsigned() && !(value_->is_number_integer() && value_->get<long long>() >= 0)) {
      fail("expected a non-negative integer");
    }
    return value_->get<std::size_t>();
  }

  bool boolean() const {
    if (!value_->is_boolean()) fail("expected true or false");
    return value_->get<bool>();
  }

  std::string string() const {
    if (!value_->is_string()) fail("expected a string");
    return value_->get<std::string>();
  }

  Eigen::VectorXd vector(std::size_t expected = 0) const {
    const std::size_t n = size();
    if (expected && n != expected) fail("expected " + std::to_string(expected) + " numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = at(i).number();
    return v;
  }

  Eigen::Vector3d vec3() const { return vector(3); }

  double number_or(const std::string& key, double fallback) const {
    return has(key) ? at(key).number() : fallback;
  }
  std::size_t count_or(const std::string& key, std::size_t fallback) const {
    return has(key) ? at(key).count() : fallback;
  }

 private:
  const json* value_;
  std::string path_;
};

Eigen::Isometry3d parse_transform(const Node& n) {
  const Eigen::Vector3d xyz = n.has("xyz") ? n.at("xyz").vec3() : Eigen::Vector3d::Zero();
  const Eigen::Vector3d rpy = n.has("rpy") ? n.at("rpy").vec3() : Eigen::Vector3d::Zero();
  return make_transform(xyz, rpy);
}

std::vector<SsvPrimitive> parse_primitive(const Node& n) {
  const std::string type = n.at("type").string();
  const double r = n.at("radius").number();
  std::vector<SsvPrimitive> out;
  if (type == "sphere") {
    out.push_back(SsvPrimitive::sphere(n.at("center").vec3(), r));
  } else if (type == "capsule") {
    out.push_back(SsvPrimitive::capsule(n.at("p0").vec3(), n.at("p1").vec3(), r));
  } else if (type == "triangle") {
    out.push_back(
        SsvPrimitive::rounded_triangle(n.at("p0").vec3(), n.at("p1").vec3(), n.at("p2").vec3(), r));
  } else if (type == "rectangle") {
    // corner + two edge vectors, split into two triangles
    const Eigen::Vector3d c = n.at("corner").vec3();
    const Eigen::Vector3d e1 = n.at("edge1").vec3();
    const Eigen::Vector3d e2 = n.at("edge2").vec3();
    out.push_back(SsvPrimitive::rounded_triangle(c, c + e1, c + e1 + e2, r));
    out.push_back(SsvPrimitive::rounded_triangle(c, c + e1 + e2, c + e2, r));
  } else {
    n.at("type").fail("unknown primitive type '" + type + "'");
  }
  for (const auto& p : out) {
    try {
      p.validate();
    } catch (const InvalidInput& e) {
      n.fail(e.what());
    }
  }
  return out;
}

SerialChain parse_chain(const Node& n) {
  SerialChain chain;
  chain.name = n.at("name").string();
  if (n.has("base")) chain.base_pose = parse_transform(n.at("base"));
  const Node joints = n.at("joints");
  for (std::size_t j = 0; j < joints.size(); ++j) {
    const Node jn = joints.at(j);
    RevoluteJoint joint;
    joint.name = jn.has("name") ? jn.at("name").string() : "joint" + std::to_string(j + 1);
    joint.origin = parse_transform(jn);
    if (jn.has("axis")) joint.axis = jn.at("axis").vec3();
    joint.lower = jn.at("lower").number();
    joint.upper = jn.at("upper").number();
    joint.max_velocity = jn.at("velocity").number();
    joint.max_acceleration = jn.at("acceleration").number();
    chain.joints.push_back(joint);
  }
  chain.link_bodies.assign(chain.joints.size() + 1, {});
  if (n.has("links")) {
    const Node links = n.at("links");
    if (links.size() > chain.link_bodies.size()) links.fail("more links than joints + 1");
    for (std::size_t k = 0; k < links.size(); ++k) {
      const Node ln = links.at(k);
      for (std::size_t p = 0; p < ln.size(); ++p) {
        for (auto& prim : parse_primitive(ln.at(p))) chain.link_bodies[k].push_back(prim);
      }
    }
  }
  chain.ee_link = n.count_or("ee_link", chain.joints.size());
  if (n.has("tcp")) chain.tcp = parse_transform(n.at("tcp"));
  try {
    chain.validate();
  } catch (const InvalidInput& e) {
    n.fail(e.what());
  }
  return chain;
}

EntityId parse_entity(const Node& n, const std::vector<SerialChain>& chains,
                      const std::map<std::string, std::size_t>& obstacles) {
  if (n.has("obstacle")) {
    const std::string name = n.at("obstacle").string();
    auto it = obstacles.find(name);
    if (it == obstacles.end()) n.at("obstacle").fail("unknown obstacle '" + name + "'");
    return {kEnvironment, it->second};
  }
  const std::size_t robot = n.at("robot").count();
  if (robot >= chains.size()) n.at("robot").fail("robot index out of range");
  const std::size_t link = n.at("link").count();
  if (link >= chains[robot].link_count()) n.at("link").fail("link index out of range");
  return {static_cast<int>(robot), link};
}

void parse_params(const Node& n, PlanningParams& p) {
  if (n.has("planner")) {
    const Node s = n.at("planner");
    p.segment_fraction = s.number_or("segment_fraction", p.segment_fraction);
    p.max_time = s.number_or("max_time", p.max_time);
    p.max_iterations = s.count_or("max_iterations", p.max_iterations);
    p.step_factor = s.number_or("step_factor", p.step_factor);
    p.planning_margin = s.number_or("planning_margin", p.planning_margin);
    if (!(p.segment_fraction > 0.0 && p.segment_fraction < 1.0)) {
      s.at("segment_fraction").fail("must lie in (0, 1)");
    }
    if (!(p.max_time > 0.0)) s.at("max_time").fail("must be positive");
    if (p.max_iterations == 0) s.at("max_iterations").fail("must be positive");
  }
  if (n.has("simplifier")) {
    const Node s = n.at("simplifier");
    p.simplify.attempts = s.count_or("attempts", p.simplify.attempts);
    p.simplify.max_time = s.number_or("max_time", p.simplify.max_time);
  }
  if (n.has("plpp")) {
    const Node s = n.at("plpp");
    p.plpp.alpha = s.number_or("alpha", p.plpp.alpha);
    p.plpp.d_obs = s.number_or("d_obs", p.plpp.d_obs);
    p.plpp.eps_rel = s.number_or("eps_rel", p.plpp.eps_rel);
    p.plpp.max_iterations = s.count_or("max_iterations", p.plpp.max_iterations);
    p.plpp.feas_tol = s.number_or("feas_tol", p.plpp.feas_tol);
    p.plpp.restoration_iterations = s.count_or("restoration_iterations", p.plpp.restoration_iterations);
    p.min_waypoints = s.count_or("min_waypoints", p.min_waypoints);
    if (!(p.plpp.d_obs > 0.0)) s.at("d_obs").fail("must be positive");
    if (!(p.plpp.alpha >= 0.0)) s.at("alpha").fail("must be non-negative");
  }
  if (n.has("coordination")) {
    const Node s = n.at("coordination");
    p.coordination_fraction = s.number_or("segment_fraction", p.coordination_fraction);
    p.coordination_margin = s.number_or("margin", p.coordination_margin);
    p.coordination_max_time = s.number_or("max_time", p.coordination_max_time);
    p.coordination_max_iterations = s.count_or("max_iterations", p.coordination_max_iterations);
    if (s.has("interpolation")) {
      try {
        p.interpolation = interpolation_from_string(s.at("interpolation").string());
      } catch (const InvalidInput& e) {
        s.at("interpolation").fail(e.what());
      }
    }
  }
  if (n.has("validation")) {
    const Node s = n.at("validation");
    p.validation_dt = s.number_or("dt", p.validation_dt);
    p.validation_margin = s.number_or("margin", p.validation_margin);
    if (!(p.validation_dt > 0.0)) s.at("dt").fail("must be positive");
  }
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  const Node root(doc, "$");
  Scenario s;
  s.source = doc;
  s.name = root.has("name") ? root.at("name").string() : "scenario";

  const Node robots = root.at("robots");
  if (robots.size() != 2) robots.fail("exactly two robots are required");
  for (std::size_t i = 0; i < robots.size(); ++i) s.chains.push_back(parse_chain(robots.at(i)));

  std::map<std::string, std::size_t> obstacle_index;
  if (root.has("scene")) {
    const Node scene = root.at("scene");
    if (scene.has("obstacles")) {
      const Node obs = scene.at("obstacles");
      for (std::size_t i = 0; i < obs.size(); ++i) {
        const Node on = obs.at(i);
        Obstacle o;
        o.name = on.at("name").string();
        if (obstacle_index.count(o.name)) on.at("name").fail("duplicate obstacle name");
        const Node prims = on.at("primitives");
        for (std::size_t p = 0; p < prims.size(); ++p) {
          for (auto& prim : parse_primitive(prims.at(p))) o.primitives.push_back(prim);
        }
        obstacle_index[o.name] = s.scene.obstacles.size();
        s.scene.obstacles.push_back(std::move(o));
      }
    }
    if (scene.has("exclusions")) {
      const Node ex = scene.at("exclusions");
      for (std::size_t i = 0; i < ex.size(); ++i) {
        const Node en = ex.at(i);
        s.scene.exclude(parse_entity(en.at("a"), s.chains, obstacle_index),
                        parse_entity(en.at("b"), s.chains, obstacle_index));
      }
    }
  }
  // Same-arm link pairs closer than this index gap are never checked.
  for (std::size_t r = 0; r < robots.size(); ++r) {
    const std::size_t gap = robots.at(r).count_or("exclude_links_within", 1);
    const auto& chain = s.chains[r];
    for (std::size_t a = 0; a < chain.link_count(); ++a) {
      for (std::size_t b = a + 1; b < chain.link_count() && b - a <= gap; ++b) {
        s.scene.exclude({static_cast<int>(r), a}, {static_cast<int>(r), b});
      }
    }
  }

  if (root.has("params")) parse_params(root.at("params"), s.params);

  std::map<std::string, Eigen::VectorXd> poses;
  const std::size_t nl = s.chains[0].dof();
  const std::size_t nr = s.chains[1].dof();
  if (root.has("poses")) {
    const Node pn = root.at("poses");
    if (!pn.raw().is_object()) pn.fail("expected an object of named poses");
    for (const auto& [name, value] : pn.raw().items()) {
      const Node p(value, pn.path() + "." + name);
      Eigen::VectorXd q(static_cast<Eigen::Index>(nl + nr));
      q << p.at("left").vector(nl), p.at("right").vector(nr);
      poses[name] = q;
    }
  }
  if (root.has("queries")) {
    const Node qn = root.at("queries");
    for (std::size_t i = 0; i < qn.size(); ++i) {
      const Node q = qn.at(i);
      MotionQuery query;
      query.name = q.has("name") ? q.at("name").string() : "query" + std::to_string(i);
      auto resolve = [&](const std::string& key) {
        const Node ref = q.at(key);
        auto it = poses.find(ref.string());
        if (it == poses.end()) ref.fail("unknown pose '" + ref.string() + "'");
        return it->second;
      };
      query.start = resolve("from");
      query.goal = resolve("to");
      s.queries.push_back(std::move(query));
    }
  }
  return s;
}

Scenario load_scenario(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw LoadError(file, "cannot open scenario file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw LoadError(file + ":" + std::to_string(line) + ":" + std::to_string(column), e.what());
  }
  try {
    return parse_scenario(doc);
  } catch (const LoadError& e) {
    throw LoadError(file + " " + e.where(), std::string(e.what()).substr(e.where().size() + 2));
  }
}

void check_queries(const Scenario& s) {
  const CollisionWorld world = s.world();
  const CompositeChain composite(s.chains[0], s.chains[1]);
  std::string problems;
  for (std::size_t i = 0; i < s.queries.size(); ++i) {
    const auto& q = s.queries[i];
    auto check = [&](const Eigen::VectorXd& config, const char* which) {
      if (!composite.within_limits(config)) {
        problems += "\n  query " + std::to_string(i) + " (" + q.name + ") " + which + ": outside joint limits";
        return;
      }
      const double d = world.min_clearance(config, ClearanceMode::full).value();
      if (d < 0.0) {
        problems += "\n  query " + std::to_string(i) + " (" + q.name + ") " + which +
                    ": in collision (clearance " + std::to_string(d) + " m)";
      }
    };
    check(q.start, "start");
    check(q.goal, "goal");
  }
  if (!problems.empty()) throw LoadError("$.queries", "invalid query endpoints:" + problems);
}

}  // namespace dualarm
