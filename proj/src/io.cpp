#include "skbd/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "skbd/errors.hpp"

#ifndef SKBD_VERSION
#define SKBD_VERSION "0.0.0"
#endif

namespace skbd {

std::string version() { return SKBD_VERSION; }

namespace {

// Strict view of a JSON object: every key must be known, every value typed.
class Obj {
 public:
  Obj(const json& j, std::string path, std::set<std::string> allowed) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ParseError(where() + "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!allowed.count(it.key())) throw ParseError("unknown key '" + field(it.key()) + "'");
  }

  bool has(const std::string& k) const { return j_.contains(k) && !j_.at(k).is_null(); }

  std::optional<double> num(const std::string& k) const {
    if (!has(k)) return std::nullopt;
    const json& v = j_.at(k);
    if (!v.is_number()) throw ParseError(field(k) + ": expected a number");
    return v.get<double>();
  }
  std::optional<int> integer(const std::string& k) const {
    if (!has(k)) return std::nullopt;
    const json& v = j_.at(k);
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>())
      return static_cast<int>(v.get<double>());
    throw ParseError(field(k) + ": expected an integer");
  }
  std::optional<bool> boolean(const std::string& k) const {
    if (!has(k)) return std::nullopt;
    if (!j_.at(k).is_boolean()) throw ParseError(field(k) + ": expected true or false");
    return j_.at(k).get<bool>();
  }
  std::optional<std::string> str(const std::string& k) const {
    if (!has(k)) return std::nullopt;
    if (!j_.at(k).is_string()) throw ParseError(field(k) + ": expected a string");
    return j_.at(k).get<std::string>();
  }
  std::optional<std::vector<double>> nums(const std::string& k) const {
    if (!has(k)) return std::nullopt;
    const json& v = j_.at(k);
    if (!v.is_array()) throw ParseError(field(k) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ParseError(field(k) + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  std::optional<std::vector<int>> ints(const std::string& k) const {
    auto v = nums(k);
    if (!v) return std::nullopt;
    std::vector<int> out;
    for (double d : *v) {
      if (std::floor(d) != d) throw ParseError(field(k) + ": expected integers");
      out.push_back(static_cast<int>(d));
    }
    return out;
  }
  const json* sub(const std::string& k) const { return has(k) ? &j_.at(k) : nullptr; }
  std::string field(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

 private:
  std::string where() const { return path_.empty() ? "" : path_ + ": "; }
  const json& j_;
  std::string path_;
};

BetaParams parse_beta(const json& j, const std::string& path, BetaParams def) {
  Obj o(j, path, {"alpha", "beta"});
  if (auto v = o.num("alpha")) def.alpha = *v;
  if (auto v = o.num("beta")) def.beta = *v;
  return def;
}

KernelKind parse_kind(const std::string& s, const std::string& field) {
  if (s == "asymmetric_gaussian") return KernelKind::asymmetric_gaussian;
  if (s == "symmetric_gaussian") return KernelKind::symmetric_gaussian;
  if (s == "kronecker") return KernelKind::kronecker;
  throw ParseError(field + ": unknown kernel kind '" + s + "'");
}

DoseScale parse_scale(const std::string& s, const std::string& field) {
  if (s == "linear") return DoseScale::linear;
  if (s == "log") return DoseScale::log;
  throw ParseError(field + ": expected 'linear' or 'log'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

json read_json_file(const std::string& path) { return parse_json_text(read_file(path)); }

void Config::require_phi() const {
  if (!has_phi) throw ConfigError("design.phi", "is required");
}

Config parse_config(const json& doc) {
  Config c;
  Obj top(doc, "", {"name", "design", "kernel", "insertion", "tite", "simulation"});
  SimDesign& s = c.sim;
  DesignConfig& d = s.design;
  if (auto v = top.str("name")) s.name = *v;
  if (const json* j = top.sub("design")) {
    Obj o(*j, "design",
          {"phi", "eps1", "eps2", "prior", "elimination_cutoff", "elimination_min_n",
           "cohort_size", "max_n", "selection_prior", "selection_kernel_value", "doses",
           "dose_scale"});
    if (auto v = o.num("phi")) d.phi = *v, c.has_phi = true;
    if (auto v = o.num("eps1")) d.eps1 = *v;
    if (auto v = o.num("eps2")) d.eps2 = *v;
    if (auto p = o.sub("prior")) d.prior = parse_beta(*p, "design.prior", d.prior);
    if (auto v = o.num("elimination_cutoff")) d.elimination_cutoff = *v;
    if (auto v = o.integer("elimination_min_n")) d.elimination_min_n = *v;
    if (auto v = o.integer("cohort_size")) d.cohort_size = *v;
    if (auto v = o.integer("max_n")) d.max_n = *v;
    if (auto p = o.sub("selection_prior"))
      d.selection_prior = parse_beta(*p, "design.selection_prior", d.selection_prior);
    if (auto v = o.num("selection_kernel_value")) d.selection_kernel_value = *v;
    if (auto v = o.nums("doses")) s.doses = *v;
    if (auto v = o.str("dose_scale")) s.scale = parse_scale(*v, "design.dose_scale");
  }
  if (const json* j = top.sub("kernel")) {
    Obj o(*j, "kernel", {"kind", "k_lower", "k_upper"});
    if (auto v = o.str("kind")) d.kernel.kind = parse_kind(*v, "kernel.kind");
    if (auto v = o.num("k_lower")) d.kernel.k_lower = *v;
    if (auto v = o.num("k_upper")) d.kernel.k_upper = *v;
  }
  if (const json* j = top.sub("insertion")) {
    Obj o(*j, "insertion",
          {"enabled", "c1", "c2", "prior", "candidate_points", "symmetric_kernel_value",
           "max_insertions", "recalibrate_sigma", "insertion_before_termination"});
    if (o.boolean("enabled").value_or(true)) {
      InsertionConfig ic;
      if (auto v = o.num("c1")) ic.c1 = *v;
      if (auto v = o.num("c2")) ic.c2 = *v;
      if (auto p = o.sub("prior")) ic.prior = parse_beta(*p, "insertion.prior", ic.prior);
      if (auto v = o.integer("candidate_points")) ic.candidate_points = *v;
      if (auto v = o.num("symmetric_kernel_value")) ic.symmetric_kernel_value = *v;
      if (auto v = o.integer("max_insertions")) ic.max_insertions = *v;
      if (auto v = o.boolean("recalibrate_sigma")) ic.recalibrate_sigma = *v;
      if (auto v = o.boolean("insertion_before_termination")) ic.insertion_before_termination = *v;
      s.insertion = ic;
    }
  }
  if (const json* j = top.sub("tite")) {
    Obj o(*j, "tite", {"enabled", "tau", "accrual_rate", "min_completed"});
    if (o.boolean("enabled").value_or(true)) {
      TiteConfig tc;
      if (auto v = o.num("tau")) tc.tau = *v;
      if (auto v = o.num("accrual_rate")) tc.accrual_rate = *v;
      if (auto v = o.integer("min_completed")) tc.min_completed = *v;
      s.tite = tc;
    }
  }
  if (const json* j = top.sub("simulation")) {
    Obj o(*j, "simulation", {"rod_threshold", "rod_inclusive"});
    if (auto v = o.num("rod_threshold")) s.metrics.rod_threshold = *v;
    if (auto v = o.boolean("rod_inclusive")) s.metrics.rod_inclusive = *v;
  }
  try {
    s.validate();
  } catch (const ConfigError& e) {
    std::string f = e.field();
    bool qualified = f.find('.') != std::string::npos;
    if (qualified) throw;
    throw ConfigError("design." + f, std::string(e.what()).substr(f.size() + 2));
  }
  if (s.doses) {
    try {
      standardize_doses(*s.doses, s.scale);
    } catch (const InvalidArgument& e) {
      throw ConfigError("design.doses", e.what());
    }
  }
  c.hash = fnv1a_hex(doc.dump());
  return c;
}

Config load_config(const std::string& path) { return parse_config(read_json_file(path)); }

DoseGrid build_grid(const Config& cfg, std::size_t m, const std::vector<double>* doses,
                    const std::vector<bool>* inserted) {
  const SimDesign& s = cfg.sim;
  if (doses) {
    if (doses->size() != m) throw MismatchError("doses and data differ in length");
    std::vector<double> pre, added;
    for (std::size_t i = 0; i < m; ++i) {
      bool ins = inserted && i < inserted->size() && (*inserted)[i];
      (ins ? added : pre).push_back((*doses)[i]);
    }
    if (inserted && inserted->size() != m) throw MismatchError("inserted flags and doses differ in length");
    DoseGrid g = standardize_doses(pre, s.scale);
    bool recal = s.insertion ? s.insertion->recalibrate_sigma : false;
    for (double d : added) g = augment_grid(g, d, recal).grid;
    return g;
  }
  if (s.doses) {
    if (s.doses->size() != m)
      throw MismatchError("data has " + std::to_string(m) + " doses, design grid has " +
                          std::to_string(s.doses->size()));
    return standardize_doses(*s.doses, s.scale);
  }
  std::vector<double> levels;
  for (std::size_t i = 0; i < m; ++i) levels.push_back(static_cast<double>(i + 1));
  return standardize_doses(levels, s.scale);
}

TrialInput parse_trial_input(const json& doc, const Config& cfg, bool require_current) {
  Obj o(doc, "", {"n", "y", "current", "eliminated_from", "insertions", "doses", "inserted",
                  "patients", "n_min", "n_max"});
  TrialInput in;
  auto doses = o.nums("doses");
  std::optional<std::vector<bool>> inserted;
  if (const json* j = o.sub("inserted")) {
    if (!j->is_array()) throw ParseError("inserted: expected an array of booleans");
    std::vector<bool> v;
    for (const auto& e : *j) {
      if (!e.is_boolean()) throw ParseError("inserted: expected an array of booleans");
      v.push_back(e.get<bool>());
    }
    inserted = v;
  }
  auto n = o.ints("n");
  auto y = o.ints("y");
  if (const json* pj = o.sub("patients")) {
    if (!pj->is_array()) throw ParseError("patients: expected an array");
    in.has_patients = true;
    for (std::size_t i = 0; i < pj->size(); ++i) {
      Obj p((*pj)[i], "patients[" + std::to_string(i) + "]",
            {"dose", "enroll_time", "dlt", "dlt_time", "followup"});
      PatientRecord r;
      auto dose = p.integer("dose");
      if (!dose) throw ConfigError(p.field("dose"), "is required");
      if (*dose < 1) throw ConfigError(p.field("dose"), "must be a 1-based dose level");
      r.dose_index = static_cast<std::size_t>(*dose - 1);
      r.enroll_time = p.num("enroll_time").value_or(0.0);
      r.dlt = p.boolean("dlt").value_or(false);
      if (auto t = p.num("dlt_time")) r.dlt_time = *t;
      else if (r.dlt) r.dlt_time = 0.0;
      auto u = p.num("followup");
      if (!u) throw ConfigError(p.field("followup"), "is required");
      r.followup = *u;
      in.patients.push_back(r);
    }
  }
  std::size_t m;
  if (n || y) {
    if (!n || !y) throw ConfigError(n ? "y" : "n", "is required");
    if (n->size() != y->size()) throw MismatchError("n and y differ in length");
    m = n->size();
  } else if (doses) {
    m = doses->size();
  } else if (cfg.sim.doses) {
    m = cfg.sim.doses->size();
  } else {
    throw ConfigError("n", "is required");
  }
  if (m < 2) throw ConfigError("n", "need at least two doses");
  TrialState& st = in.state;
  st.grid = build_grid(cfg, m, doses ? &*doses : nullptr, inserted ? &*inserted : nullptr);
  if (n) {
    for (std::size_t j = 0; j < m; ++j)
      if ((*n)[j] < 0 || (*y)[j] < 0 || (*y)[j] > (*n)[j])
        throw ConfigError("y", "dose " + std::to_string(j + 1) + " needs 0 <= y <= n");
    st.data = TrialData(*n, *y);
  } else {
    st.data = TrialData(m);
  }
  if (in.has_patients) {
    if (n) throw ConfigError("patients", "give either patients or n/y, not both");
    for (const auto& r : in.patients) {
      if (r.dose_index >= m) throw ConfigError("patients", "dose level out of range");
      st.data.add(r.dose_index, 1, r.dlt_observed() ? 1 : 0);
    }
  }
  auto cur = o.integer("current");
  if (cur) {
    if (*cur < 1 || static_cast<std::size_t>(*cur) > m)
      throw ConfigError("current", "must be a dose level between 1 and " + std::to_string(m));
    st.current = static_cast<std::size_t>(*cur - 1);
  } else if (require_current) {
    throw ConfigError("current", "is required");
  }
  if (auto e = o.integer("eliminated_from")) {
    if (*e < 1 || static_cast<std::size_t>(*e) > m)
      throw ConfigError("eliminated_from", "must be a dose level between 1 and " + std::to_string(m));
    st.eliminated_from = static_cast<std::size_t>(*e - 1);
    if (st.current >= *st.eliminated_from)
      throw ConfigError("current", "lies at or above the eliminated dose");
  }
  if (auto k = o.integer("insertions")) {
    if (*k < 0) throw ConfigError("insertions", "must be nonnegative");
    st.insertions = *k;
  } else {
    for (bool b : st.grid.inserted) st.insertions += b;
  }
  in.n_min = o.integer("n_min");
  in.n_max = o.integer("n_max");
  return in;
}

Scenario parse_scenario(const json& doc) {
  Obj o(doc, "scenario", {"name", "doses", "tox", "phi", "mtd_index", "mtd_dose", "emax", "dose_scale"});
  Scenario s;
  s.name = o.str("name").value_or("scenario");
  auto d = o.nums("doses");
  auto t = o.nums("tox");
  if (!t) throw ConfigError("scenario.tox", "is required");
  s.tox = *t;
  if (d) {
    s.raw_doses = *d;
  } else {
    for (std::size_t i = 0; i < t->size(); ++i) s.raw_doses.push_back(static_cast<double>(i + 1));
  }
  auto phi = o.num("phi");
  if (!phi) throw ConfigError("scenario.phi", "is required");
  s.phi = *phi;
  if (auto v = o.str("dose_scale")) s.scale = parse_scale(*v, "scenario.dose_scale");
  if (const json* e = o.sub("emax")) {
    Obj eo(*e, "scenario.emax", {"e0", "emax", "ec50", "gamma"});
    EmaxParams p;
    if (auto v = eo.num("e0")) p.e0 = *v;
    if (auto v = eo.num("emax")) p.emax = *v;
    auto ec = eo.num("ec50");
    auto g = eo.num("gamma");
    if (!ec || !g) throw ConfigError("scenario.emax", "needs ec50 and gamma");
    if (!(*ec > 0.0) || !(*g > 0.0)) throw ConfigError("scenario.emax", "ec50 and gamma must be positive");
    p.ec50 = *ec;
    p.gamma = *g;
    s.emax = p;
  }
  if (auto v = o.integer("mtd_index")) {
    if (*v < 1) throw ConfigError("scenario.mtd_index", "must be a 1-based dose level");
    s.true_mtd_index = static_cast<std::size_t>(*v - 1);
  }
  if (auto v = o.num("mtd_dose")) s.true_mtd_dose = *v;
  if (!s.true_mtd_index && !s.true_mtd_dose) s.true_mtd_index = mtd_index(s.tox, s.phi);
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("scenario", e.what());
  }
  return s;
}

std::vector<Scenario> parse_scenarios(const json& doc) {
  const json* arr = &doc;
  if (doc.is_object() && doc.contains("scenarios")) {
    Obj o(doc, "", {"scenarios", "manifest"});
    arr = o.sub("scenarios");
    if (!arr) throw ParseError("scenarios: expected an array");
  }
  std::vector<Scenario> out;
  if (arr->is_array()) {
    for (const auto& e : *arr) out.push_back(parse_scenario(e));
  } else {
    out.push_back(parse_scenario(*arr));
  }
  return out;
}

std::vector<Scenario> load_scenarios(const std::string& path) {
  return parse_scenarios(read_json_file(path));
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["doses"] = s.raw_doses;
  j["tox"] = s.tox;
  j["phi"] = s.phi;
  j["mtd_index"] = s.true_mtd_index ? json(*s.true_mtd_index + 1) : json(nullptr);
  j["mtd_dose"] = s.true_mtd_dose ? json(*s.true_mtd_dose) : json(nullptr);
  if (s.emax)
    j["emax"] = {{"e0", s.emax->e0}, {"emax", s.emax->emax}, {"ec50", s.emax->ec50},
                 {"gamma", s.emax->gamma}};
  if (s.scale != DoseScale::linear) j["dose_scale"] = to_string(s.scale);
  return rounded(j);
}

double round_sig(double x, int digits) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

std::string fmt_num(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

json rounded(const json& j) {
  if (j.is_number_float()) {
    double v = j.get<double>();
    if (!std::isfinite(v)) return nullptr;
    return round_sig(v);
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& e : j) out.push_back(rounded(e));
    return out;
  }
  if (j.is_object()) {
    json out = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = rounded(it.value());
    return out;
  }
  return j;
}

namespace {

std::string cell(const std::optional<int>& v, const char* na) {
  return v ? std::to_string(*v) : std::string(na);
}

}  // namespace

std::string render_table_text(const std::vector<TableRow>& rows) {
  const char* labels[4] = {"Number of patients treated", "Escalate if # of DLT <=",
                           "Deescalate if # of DLT >=", "Eliminate if # of DLT >="};
  std::vector<std::vector<std::string>> grid(4);
  for (const auto& r : rows) {
    grid[0].push_back(std::to_string(r.n));
    grid[1].push_back(cell(r.escalate_le, "NA"));
    grid[2].push_back(cell(r.deescalate_ge, "NA"));
    grid[3].push_back(cell(r.eliminate_ge, "NA"));
  }
  std::size_t lw = 0;
  for (auto l : labels) lw = std::max(lw, std::string(l).size());
  std::vector<std::size_t> cw(rows.size(), 2);
  for (std::size_t c = 0; c < rows.size(); ++c)
    for (int r = 0; r < 4; ++r) cw[c] = std::max(cw[c], grid[r][c].size());
  std::string out;
  for (int r = 0; r < 4; ++r) {
    std::string line = labels[r];
    line.resize(lw, ' ');
    for (std::size_t c = 0; c < rows.size(); ++c)
      line += std::string(cw[c] - grid[r][c].size() + 1, ' ') + grid[r][c];
    out += line + "\n";
  }
  return out;
}

std::string render_table_csv(const std::vector<TableRow>& rows) {
  std::string out = "n,escalate_le,deescalate_ge,eliminate_ge\n";
  for (const auto& r : rows)
    out += std::to_string(r.n) + "," + cell(r.escalate_le, "") + "," + cell(r.deescalate_ge, "") +
           "," + cell(r.eliminate_ge, "") + "\n";
  return out;
}

json table_to_json(const std::vector<TableRow>& rows) {
  json arr = json::array();
  auto v = [](const std::optional<int>& x) { return x ? json(*x) : json(nullptr); };
  for (const auto& r : rows)
    arr.push_back({{"n", r.n},
                   {"escalate_le", v(r.escalate_le)},
                   {"deescalate_ge", v(r.deescalate_ge)},
                   {"eliminate_ge", v(r.eliminate_ge)}});
  return arr;
}

json decision_to_json(const DecisionDetail& d, const DesignConfig& cfg, const TrialState& st,
                      std::optional<bool> escalation_permitted) {
  KeyPartition keys = build_keys(cfg.phi, cfg.eps1, cfg.eps2);
  json j;
  std::string action = to_string(d.action);
  if (escalation_permitted && !*escalation_permitted && d.action == ActionKind::escalate)
    action = to_string(ActionKind::stay);
  j["action"] = action;
  j["model_action"] = to_string(d.action);
  j["current"] = st.current + 1;
  j["eliminate"] = d.eliminate;
  j["prob_above_target"] = d.prob_above_phi;
  j["posterior"] = {{"alpha", d.posterior.alpha}, {"beta", d.posterior.beta}};
  j["pseudo_counts"] = {{"y_prime", d.pseudo.y_prime}, {"n_prime", d.pseudo.n_prime}};
  j["strongest_key"] = d.strongest;
  j["target_key"] = d.target;
  json ks = json::array();
  for (std::size_t k = 0; k < keys.size(); ++k)
    ks.push_back({{"index", k}, {"lo", keys.lo(k)}, {"hi", keys.hi(k)}, {"prob", d.key_probs[k]}});
  j["keys"] = ks;
  json xs = json::array(), ys = json::array();
  for (int i = 0; i <= 200; ++i) {
    double x = i / 200.0;
    xs.push_back(x);
    double v = beta_density(d.posterior, x);
    ys.push_back(std::isfinite(v) ? json(v) : json(nullptr));
  }
  j["density"] = {{"x", xs}, {"y", ys}};
  if (escalation_permitted) j["escalation_permitted"] = *escalation_permitted;
  return rounded(j);
}

json oc_to_json(const OCSummary& o) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j = {{"scenario", o.scenario},
            {"design", o.design},
            {"replicates", o.replicates},
            {"seed", o.seed},
            {"pcs", opt(o.pcs)},
            {"pca", opt(o.pca)},
            {"above_mtd", o.above_mtd},
            {"rod", o.rod},
            {"no_selection", o.no_selection},
            {"mean_n", o.mean_n},
            {"modification_rate", opt(o.modification_rate)},
            {"inserted_mean", opt(o.inserted_mean)},
            {"inserted_sd", opt(o.inserted_sd)},
            {"inserted_selection", opt(o.inserted_selection)},
            {"inserted_allocation", opt(o.inserted_allocation)},
            {"per_dose_selection", o.per_dose_selection},
            {"per_dose_allocation", o.per_dose_allocation}};
  return rounded(j);
}

namespace {

std::string optcell(const std::optional<double>& v) { return v ? fmt_num(*v) : ""; }

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

std::string oc_csv_header(std::size_t doses) {
  std::string h =
      "scenario,design,replicates,seed,pcs,pca,above_mtd,rod,no_selection,mean_n,"
      "modification_rate,inserted_mean,inserted_sd,inserted_selection,inserted_allocation";
  for (std::size_t k = 1; k <= doses; ++k) h += ",sel_d" + std::to_string(k);
  for (std::size_t k = 1; k <= doses; ++k) h += ",pts_d" + std::to_string(k);
  return h;
}

std::string oc_csv_row(const OCSummary& o) {
  std::string r = csv_text(o.scenario) + "," + csv_text(o.design) + "," +
                  std::to_string(o.replicates) + "," + std::to_string(o.seed) + "," +
                  optcell(o.pcs) + "," + optcell(o.pca) + "," + fmt_num(o.above_mtd) + "," +
                  fmt_num(o.rod) + "," + fmt_num(o.no_selection) + "," + fmt_num(o.mean_n) + "," +
                  optcell(o.modification_rate) + "," + optcell(o.inserted_mean) + "," +
                  optcell(o.inserted_sd) + "," + optcell(o.inserted_selection) + "," +
                  optcell(o.inserted_allocation);
  return r;
}

std::string render_oc_csv(const std::vector<OCSummary>& rows) {
  std::size_t m = 0;
  for (const auto& o : rows) m = std::max(m, o.per_dose_selection.size());
  std::string out = oc_csv_header(m) + "\n";
  for (const auto& o : rows) {
    std::string r = oc_csv_row(o);
    for (std::size_t k = 0; k < m; ++k)
      r += "," + (k < o.per_dose_selection.size() ? fmt_num(o.per_dose_selection[k]) : "");
    for (std::size_t k = 0; k < m; ++k)
      r += "," + (k < o.per_dose_allocation.size() ? fmt_num(o.per_dose_allocation[k]) : "");
    out += r + "\n";
  }
  return out;
}

json manifest_to_json(const RunManifest& m) {
  return {{"command", m.command},         {"config_path", m.config_path},
          {"config_hash", m.config_hash}, {"seed", m.seed},
          {"output_path", m.output_path}, {"version", m.version}};
}

std::string manifest_csv_comment(const RunManifest& m) {
  return "# command: " + m.command + "\n# config_path: " + m.config_path +
         "\n# config_hash: " + m.config_hash + "\n# seed: " + std::to_string(m.seed) +
         "\n# output_path: " + m.output_path + "\n# version: " + m.version + "\n";
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace skbd
