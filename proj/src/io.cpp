#include "apdesign/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

namespace apd::io {

namespace {

[[noreturn]] void parse_error(const std::string& source, std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::Parse, source + ":" + std::to_string(line) + ": " + msg);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct Row {
  std::size_t line = 0;
  std::vector<std::string_view> fields;
};

// Non-empty rows after the header; the header must equal one of `headers`.
// Returns the index of the matched header.
std::size_t read_rows(std::string_view text, const std::vector<std::vector<std::string>>& headers,
                      const std::string& source, std::vector<Row>& rows) {
  std::size_t line_no = 0;
  std::optional<std::size_t> header;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    auto fields = split(line);
    if (!header) {
      for (std::size_t h = 0; h < headers.size(); ++h) {
        if (fields.size() != headers[h].size()) continue;
        bool same = true;
        for (std::size_t i = 0; i < fields.size(); ++i) same = same && fields[i] == headers[h][i];
        if (same) header = h;
      }
      if (!header) {
        std::string expected;
        for (const auto& h : headers) {
          if (!expected.empty()) expected += " or ";
          std::string joined;
          for (const auto& f : h) joined += (joined.empty() ? "" : ",") + f;
          expected += "'" + joined + "'";
        }
        parse_error(source, line_no, "expected header " + expected);
      }
      continue;
    }
    if (fields.size() != headers[*header].size()) {
      parse_error(source, line_no,
                  "expected " + std::to_string(headers[*header].size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    rows.push_back({line_no, std::move(fields)});
  }
  if (!header) parse_error(source, line_no, "missing header");
  return *header;
}

AgentId parse_id(std::string_view s, const std::string& source, std::size_t line) {
  AgentId v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) {
    parse_error(source, line, "'" + std::string(s) + "' is not a positive agent id");
  }
  return v;
}

double parse_real(std::string_view s, const std::string& source, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    parse_error(source, line, "'" + std::string(s) + "' is not a finite number");
  }
  return v;
}

MatchEdge make_edge(MatchingMode mode, AgentId a, AgentId b) {
  return mode == MatchingMode::OneToOne ? canonical_pair(a, b) : MatchEdge{a, b};
}

const std::vector<std::string> kOneToOneHeader{"a", "b"};
const std::vector<std::string> kManyToOneHeader{"supplier", "demand"};

std::vector<std::string> with(std::vector<std::string> h, const std::string& extra) {
  h.push_back(extra);
  return h;
}

json vertex_to_json(const Vertex& v) {
  if (v.side == Side::Agent) return v.id;
  return to_string(v);
}

Vertex vertex_from_json(const json& j, MatchingMode mode) {
  if (mode == MatchingMode::OneToOne) {
    if (!j.is_number_unsigned() || j.get<std::uint64_t>() == 0 ||
        j.get<std::uint64_t>() > std::numeric_limits<AgentId>::max()) {
      throw Error(ErrorCode::Parse, "one-to-one vertex must be a positive integer, got " + j.dump());
    }
    return {Side::Agent, j.get<AgentId>()};
  }
  if (!j.is_string()) {
    throw Error(ErrorCode::Parse, "many-to-one vertex must be a string like \"s1\", got " + j.dump());
  }
  const auto s = j.get<std::string>();
  AgentId id = 0;
  const char* end = s.data() + s.size();
  const bool ok = s.size() >= 2 && (s[0] == 's' || s[0] == 'd') &&
                  std::from_chars(s.data() + 1, end, id).ptr == end && id > 0;
  if (!ok) throw Error(ErrorCode::Parse, "bad many-to-one vertex \"" + s + "\"");
  return {s[0] == 's' ? Side::Supplier : Side::Demand, id};
}

template <class Fn>
auto guarded(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string(what) + ": " + e.what());
  }
}

std::size_t parse_index(const std::string& key) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), v);
  if (ec != std::errc() || ptr != key.data() + key.size()) {
    throw Error(ErrorCode::Parse, "component index '" + key + "' is not a non-negative integer");
  }
  return v;
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

json normality_to_json(const std::optional<NormalityResult>& r) {
  if (!r) return nullptr;
  return {{"samples", r->samples},
          {"statistic", r->statistic},
          {"critical", r->critical},
          {"pass", r->pass}};
}

json optional_number(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Parse, path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Parse, path + ": cannot open file for writing");
  out << content;
}

json parse_json(std::string_view text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, source + ": " + e.what());
  }
}

json read_json(const std::string& path) { return parse_json(read_file(path), path); }

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

std::string_view mode_name(MatchingMode mode) {
  return mode == MatchingMode::OneToOne ? "one-to-one" : "many-to-one";
}

MatchingMode parse_mode(std::string_view name) {
  if (name == "one-to-one") return MatchingMode::OneToOne;
  if (name == "many-to-one") return MatchingMode::ManyToOne;
  throw Error(ErrorCode::Parse, "unknown mode '" + std::string(name) + "'");
}

Matching parse_matching_csv(std::string_view text, MatchingMode mode, int capacity,
                            const std::string& source) {
  std::vector<Row> rows;
  read_rows(text, {mode == MatchingMode::OneToOne ? kOneToOneHeader : kManyToOneHeader}, source,
            rows);
  Matching m;
  m.mode = mode;
  m.capacity = capacity;
  for (const auto& r : rows) {
    const AgentId a = parse_id(r.fields[0], source, r.line);
    const AgentId b = parse_id(r.fields[1], source, r.line);
    if (mode == MatchingMode::OneToOne && a == b) {
      throw Error(ErrorCode::InvalidEdge,
                  source + ":" + std::to_string(r.line) + ": agent " + std::to_string(a) +
                      " matched with itself");
    }
    m.edges.push_back(make_edge(mode, a, b));
  }
  return m;
}

Matching read_matching_csv(const std::string& path, MatchingMode mode, int capacity) {
  return parse_matching_csv(read_file(path), mode, capacity, path);
}

OutcomeTable parse_outcomes_csv(std::string_view text, MatchingMode mode,
                                const std::string& source) {
  std::vector<Row> rows;
  read_rows(text, {with(kOneToOneHeader, "y"), with(kManyToOneHeader, "y")}, source, rows);
  OutcomeTable y;
  for (const auto& r : rows) {
    const MatchEdge e = make_edge(mode, parse_id(r.fields[0], source, r.line),
                                  parse_id(r.fields[1], source, r.line));
    if (y.find(e)) parse_error(source, r.line, "duplicate outcome for " + to_string(e));
    y.set(e, parse_real(r.fields[2], source, r.line));
  }
  return y;
}

OutcomeTable read_outcomes_csv(const std::string& path, MatchingMode mode) {
  return parse_outcomes_csv(read_file(path), mode, path);
}

DisagreementSet parse_disagreement_csv(std::string_view text, int capacity,
                                       const std::string& source) {
  std::vector<Row> rows;
  const auto header = read_rows(
      text, {with(kOneToOneHeader, "label"), with(kManyToOneHeader, "label")}, source, rows);
  DisagreementSet d;
  d.mode = header == 0 ? MatchingMode::OneToOne : MatchingMode::ManyToOne;
  d.capacity = capacity;
  std::set<MatchEdge> seen;
  for (const auto& r : rows) {
    const MatchEdge e = make_edge(d.mode, parse_id(r.fields[0], source, r.line),
                                  parse_id(r.fields[1], source, r.line));
    if (!seen.insert(e).second) parse_error(source, r.line, "edge " + to_string(e) + " repeated");
    const auto label = r.fields[2];
    if (label == "t" || label == "T") {
      d.t_edges.push_back(e);
    } else if (label == "c" || label == "C") {
      d.c_edges.push_back(e);
    } else {
      parse_error(source, r.line, "label must be t or c, got '" + std::string(label) + "'");
    }
  }
  std::sort(d.t_edges.begin(), d.t_edges.end());
  std::sort(d.c_edges.begin(), d.c_edges.end());
  return d;
}

DisagreementSet read_disagreement_csv(const std::string& path, int capacity) {
  return parse_disagreement_csv(read_file(path), capacity, path);
}

std::string disagreement_csv(const DisagreementSet& d) {
  std::string out = d.mode == MatchingMode::OneToOne ? "a,b,label\n" : "supplier,demand,label\n";
  for (const auto* edges : {&d.t_edges, &d.c_edges}) {
    const char* label = edges == &d.t_edges ? "t" : "c";
    for (const auto& e : *edges) {
      out += std::to_string(e.a) + "," + std::to_string(e.b) + "," + label + "\n";
    }
  }
  return out;
}

Population population_from_json(const json& j) {
  return guarded("population", [&] {
    Population p;
    p.mode = parse_mode(j.at("mode").get<std::string>());
    p.capacity = j.value("capacity", 1);
    if (p.mode == MatchingMode::OneToOne) {
      p.agents = j.at("agents").get<std::vector<AgentId>>();
    } else {
      p.suppliers = j.at("suppliers").get<std::vector<AgentId>>();
      p.demands = j.at("demands").get<std::vector<AgentId>>();
    }
    return p;
  });
}

void apply_population(Matching& m, const Population& pop) {
  if (m.mode != pop.mode) {
    throw Error(ErrorCode::ModeMismatch, "population sidecar is " +
                                             std::string(mode_name(pop.mode)) + ", matching is " +
                                             std::string(mode_name(m.mode)));
  }
  if (m.mode == MatchingMode::ManyToOne && m.capacity != pop.capacity) {
    throw Error(ErrorCode::ModeMismatch, "population capacity " + std::to_string(pop.capacity) +
                                             " differs from " + std::to_string(m.capacity));
  }
  m.agents = pop.agents;
  m.suppliers = pop.suppliers;
  m.demands = pop.demands;
}

json components_to_json(const ComponentsFile& f) {
  json comps = json::array();
  for (const auto& c : f.components) {
    json vertices = json::array();
    for (const auto& v : c.vertices) vertices.push_back(vertex_to_json(v));
    json labels = json::array();
    for (auto l : c.labels) labels.push_back(std::string(to_string(l)));
    comps.push_back({{"kind", std::string(to_string(c.kind))},
                     {"vertices", std::move(vertices)},
                     {"labels", std::move(labels)}});
  }
  return {{"mode", std::string(mode_name(f.mode))},
          {"capacity", f.capacity},
          {"components", std::move(comps)}};
}

ComponentsFile components_from_json(const json& j) {
  return guarded("components", [&] {
    ComponentsFile f;
    f.mode = parse_mode(j.at("mode").get<std::string>());
    f.capacity = j.value("capacity", 1);
    for (const auto& jc : j.at("components")) {
      AlternatingComponent c;
      const auto kind = jc.at("kind").get<std::string>();
      if (kind == "path") {
        c.kind = ComponentKind::Path;
      } else if (kind == "cycle") {
        c.kind = ComponentKind::Cycle;
      } else {
        throw Error(ErrorCode::Parse, "unknown component kind '" + kind + "'");
      }
      for (const auto& v : jc.at("vertices")) c.vertices.push_back(vertex_from_json(v, f.mode));
      for (const auto& l : jc.at("labels")) {
        const auto s = l.get<std::string>();
        if (s == "T") {
          c.labels.push_back(EdgeLabel::T);
        } else if (s == "C") {
          c.labels.push_back(EdgeLabel::C);
        } else {
          throw Error(ErrorCode::Parse, "unknown edge label '" + s + "'");
        }
      }
      check_component_shape(c);
      f.components.push_back(std::move(c));
    }
    return f;
  });
}

json assignment_to_json(const Assignment& a) {
  json p_map = json::object();
  for (const auto& [index, p] : a.params.p_overrides) p_map[std::to_string(index)] = p;
  json w = json::array();
  for (const auto& wi : a.w) {
    json row = json::array();
    for (auto x : wi) row.push_back(static_cast<int>(x));
    w.push_back(std::move(row));
  }
  return {{"design", a.design == DesignKind::AP ? "AP" : "naive"},
          {"seed", a.params.seed},
          {"p", a.params.p},
          {"p_map", std::move(p_map)},
          {"w", std::move(w)}};
}

Assignment assignment_from_json(const json& j) {
  return guarded("assignment", [&] {
    Assignment a;
    const auto design = j.value("design", std::string("AP"));
    if (design == "AP") {
      a.design = DesignKind::AP;
    } else if (design == "naive") {
      a.design = DesignKind::Naive;
    } else {
      throw Error(ErrorCode::Parse, "unknown design '" + design + "'");
    }
    a.params.seed = j.value("seed", std::uint64_t{0});
    a.params.p = j.at("p").get<double>();
    if (j.contains("p_map")) a.params.p_overrides = p_map_from_json(j.at("p_map"));
    a.params.validate();
    for (const auto& row : j.at("w")) {
      std::vector<std::uint8_t> wi;
      for (const auto& x : row) {
        const int v = x.get<int>();
        if (v < 0 || v > 255) throw Error(ErrorCode::Parse, "selection entry out of range");
        wi.push_back(static_cast<std::uint8_t>(v));
      }
      a.w.push_back(std::move(wi));
    }
    return a;
  });
}

std::map<std::size_t, double> p_map_from_json(const json& j) {
  return guarded("p_map", [&] {
    std::map<std::size_t, double> out;
    for (const auto& [key, value] : j.items()) {
      const double p = value.get<double>();
      check_p(p);
      out[parse_index(key)] = p;
    }
    return out;
  });
}

json report_to_json(const EstimateReport& r) {
  json per = json::array();
  for (const auto& c : r.per_component) {
    per.push_back({{"index", c.index},
                   {"k", c.k},
                   {"kind", std::string(to_string(c.kind))},
                   {"gamma_hat", c.gamma_hat},
                   {"sigma2_i_hat", c.sigma2_i_hat}});
  }
  return {{"tau_hat", r.tau_hat}, {"sigma2_hat", r.sigma2_hat}, {"ci_lo", r.ci_lo},
          {"ci_hi", r.ci_hi},     {"alpha", r.alpha},           {"n", r.n_normalizer},
          {"per_component", std::move(per)}};
}

json validation_to_json(const DecompositionReport& r) {
  json conds = json::array();
  for (const auto& c : r.conditions) {
    conds.push_back(
        {{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"witnesses", c.witnesses}});
  }
  return {{"pass", r.all_pass()}, {"conditions", std::move(conds)}};
}

ScenarioSpec scenario_from_json(const json& j, const std::string& base_dir) {
  return guarded("scenario", [&] {
    ScenarioSpec s;
    const auto& g = j.at("generator");
    const auto type = g.at("type").get<std::string>();
    auto& gen = s.generator;
    if (type == "fixed_components") {
      gen.kind = GeneratorKind::FixedComponents;
      gen.components_path = resolve(base_dir, g.at("components").get<std::string>());
    } else if (type == "random_one_to_one") {
      gen.kind = GeneratorKind::RandomOneToOne;
      gen.components = g.value("components", gen.components);
      gen.cycle_fraction = g.value("cycle_fraction", gen.cycle_fraction);
      gen.min_length = g.value("min_length", gen.min_length);
      gen.max_length = g.value("max_length", gen.max_length);
    } else if (type == "random_many_to_one") {
      gen.kind = GeneratorKind::RandomManyToOne;
      gen.suppliers = g.value("suppliers", gen.suppliers);
      gen.demands = g.value("demands", gen.demands);
      gen.capacity = g.value("capacity", gen.capacity);
    } else if (type == "cyclic_shift") {
      gen.kind = GeneratorKind::CyclicShift;
      gen.n = g.value("n", gen.n);
    } else {
      throw Error(ErrorCode::Parse, "unknown generator type '" + type + "'");
    }

    if (j.contains("outcomes")) {
      const auto& o = j.at("outcomes");
      const auto model = o.at("model").get<std::string>();
      if (model == "constant") {
        s.outcomes.model = OutcomeModel::ConstantB;
      } else if (model == "uniform") {
        s.outcomes.model = OutcomeModel::UniformOnZeroB;
      } else if (model == "table") {
        s.outcomes.model = OutcomeModel::TableFromFile;
        s.outcomes.path = resolve(base_dir, o.at("path").get<std::string>());
      } else {
        throw Error(ErrorCode::Parse, "unknown outcome model '" + model + "'");
      }
      s.outcomes.bound = o.value("bound", s.outcomes.bound);
    }

    s.params.p = j.value("p", s.params.p);
    if (j.contains("p_map")) s.params.p_overrides = p_map_from_json(j.at("p_map"));
    s.params.seed = j.value("seed", std::uint64_t{0});
    s.params.validate();
    s.replications = j.value("replications", s.replications);
    if (s.replications == 0) throw Error(ErrorCode::Parse, "replications must be >= 1");
    s.alpha = j.value("alpha", s.alpha);
    if (!(s.alpha > 0.0 && s.alpha < 1.0)) {
      throw Error(ErrorCode::InvalidAlpha, "alpha must lie in (0, 1)");
    }
    if (j.contains("n")) s.normalizer = j.at("n").get<double>();
    return s;
  });
}

json sim_report_to_json(const SimReport& r) {
  return {{"replications", r.replications},
          {"seed", r.seed},
          {"components", r.components},
          {"disagreement_edges", r.disagreement_edges},
          {"n", r.n},
          {"tau", r.tau},
          {"mean_tau_hat", r.mean_tau_hat},
          {"bias", r.bias},
          {"empirical_variance", optional_number(r.empirical_variance)},
          {"mean_sigma2_hat", r.mean_sigma2_hat},
          {"true_variance", r.true_variance},
          {"variance_upper_bound", r.variance_upper_bound},
          {"naive_variance", r.naive_variance},
          {"naive_empirical_variance", optional_number(r.naive_empirical_variance)},
          {"ci_coverage", r.ci_coverage},
          {"normality", normality_to_json(r.normality)},
          {"naive_normality", normality_to_json(r.naive_normality)},
          {"note", r.note}};
}

std::string qq_csv(const NormalityResult& r) {
  std::ostringstream out;
  out.precision(17);
  out << "empirical_q,normal_q\n";
  for (const auto& [e, n] : r.qq) out << e << "," << n << "\n";
  return out.str();
}

}  // namespace apd::io
