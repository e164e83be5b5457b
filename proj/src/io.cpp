#include "fht/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fht {

namespace {

constexpr int kDatasetFormatVersion = 1;
constexpr int kModelFormatVersion = 1;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// strips a trailing '#' comment (model/config files only)
std::string strip_comment(const std::string& s) {
  const auto pos = s.find('#');
  return pos == std::string::npos ? s : s.substr(0, pos);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != trim(s).size() && !trim(s.substr(used)).empty())
      throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError(where + ": bad number '" + trim(s) + "'");
  }
}

long parse_long(const std::string& s, const std::string& where) {
  try {
    return std::stol(trim(s));
  } catch (const std::exception&) {
    throw ParseError(where + ": bad integer '" + trim(s) + "'");
  }
}

}  // namespace

std::string format_double(double v) {
  // shortest representation that parses back to the same double
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// model files

ModelSpec read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file '" + path + "'");

  ModelSpec spec;
  spec.name = path;
  std::vector<std::pair<int, std::string>> rows;  // (1-based label, entries)
  bool saw_version = false;
  int lineno = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path + ":" + std::to_string(lineno);
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "version") {
      if (parse_long(value, where) != kModelFormatVersion)
        throw ParseError(where + ": unsupported model format version " + value);
      saw_version = true;
    } else if (key == "name") {
      spec.name = value;
    } else if (key == "states") {
      spec.n_states = static_cast<int>(parse_long(value, where));
    } else if (key == "terminal") {
      std::istringstream is(value);
      long label;
      spec.terminal_set.clear();
      while (is >> label) spec.terminal_set.push_back(static_cast<int>(label) - 1);
      std::sort(spec.terminal_set.begin(), spec.terminal_set.end());
    } else if (key == "covariate") {
      spec.covariate = CovariateLaw::parse(value);
    } else if (key == "limit_base") {
      spec.limit.base = static_cast<int>(parse_long(value, where));
    } else if (key == "limit_poisson_mean") {
      spec.limit.poisson_mean = parse_double(value, where);
    } else if (key == "rate") {
      try {
        spec.rate_fn = Expr::parse(value);
      } catch (const ExprError& e) {
        throw ParseError(where + ": " + e.what());
      }
    } else if (key == "initial") {
      std::istringstream is(value);
      std::string word;
      is >> word;
      if (word == "uniform_nonterminal") {
        spec.initial.kind = InitialLaw::Kind::UniformNonTerminal;
      } else if (word == "fixed") {
        spec.initial.kind = InitialLaw::Kind::Fixed;
        long label;
        if (!(is >> label)) throw ParseError(where + ": 'fixed' needs a state label");
        spec.initial.fixed_state = static_cast<int>(label) - 1;
      } else if (word == "weights") {
        spec.initial.kind = InitialLaw::Kind::Weights;
        double w;
        spec.initial.weights.clear();
        while (is >> w) spec.initial.weights.push_back(w);
      } else {
        throw ParseError(where + ": unknown initial law '" + word + "'");
      }
    } else if (key.rfind("row", 0) == 0) {
      const int label = static_cast<int>(parse_long(key.substr(3), where));
      rows.emplace_back(label, value);
    } else {
      throw ParseError(where + ": unknown key '" + key + "'");
    }
  }
  if (!saw_version) throw ParseError(path + ": missing 'version' line");
  if (spec.n_states <= 0) throw ParseError(path + ": missing or bad 'states'");
  if (static_cast<int>(rows.size()) != spec.n_states)
    throw ParseError(path + ": expected " + std::to_string(spec.n_states) +
                     " transition rows, got " + std::to_string(rows.size()));

  spec.transition_fn.assign(spec.n_states * spec.n_states, Expr());
  std::vector<bool> seen(spec.n_states, false);
  for (const auto& [label, text] : rows) {
    if (label < 1 || label > spec.n_states)
      throw ParseError(path + ": row label " + std::to_string(label) +
                       " out of range");
    if (seen[label - 1])
      throw ParseError(path + ": duplicate row " + std::to_string(label));
    seen[label - 1] = true;
    const auto cells = split(text, ',');
    if (static_cast<int>(cells.size()) != spec.n_states)
      throw ParseError(path + ": row " + std::to_string(label) + " has " +
                       std::to_string(cells.size()) + " entries, expected " +
                       std::to_string(spec.n_states));
    for (int c = 0; c < spec.n_states; ++c) {
      try {
        spec.transition_fn[(label - 1) * spec.n_states + c] =
            Expr::parse(trim(cells[c]));
      } catch (const ExprError& e) {
        throw ParseError(path + ": row " + std::to_string(label) + ": " +
                         e.what());
      }
    }
  }
  return spec;
}

void write_model_file(const std::string& path, const ModelSpec& spec) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write model file '" + path + "'");
  out << "version = " << kModelFormatVersion << "\n";
  out << "name = " << spec.name << "\n";
  out << "states = " << spec.n_states << "\n";
  out << "terminal =";
  for (int s : spec.terminal_set) out << " " << s + 1;
  out << "\n";
  out << "covariate = " << spec.covariate.to_string() << "\n";
  out << "limit_base = " << spec.limit.base << "\n";
  out << "limit_poisson_mean = " << format_double(spec.limit.poisson_mean) << "\n";
  out << "rate = " << spec.rate_fn.source() << "\n";
  out << "initial = " << spec.initial.to_string() << "\n";
  for (int r = 0; r < spec.n_states; ++r) {
    out << "row" << r + 1 << " =";
    for (int c = 0; c < spec.n_states; ++c) {
      out << (c == 0 ? " " : ", ")
          << spec.transition_fn[r * spec.n_states + c].source();
    }
    out << "\n";
  }
}

ModelSpec load_model(const std::string& name_or_path) {
  if (name_or_path == "model-a") return builtin_model_a();
  if (name_or_path == "model-b") return builtin_model_b();
  return read_model_file(name_or_path);
}

// ---------------------------------------------------------------------------
// dataset files

void write_dataset(std::ostream& os, const Dataset& ds) {
  os << "# fht-dataset v" << kDatasetFormatVersion << " p=" << ds.covariate_dim
     << " states=" << ds.n_states << " n=" << ds.records.size()
     << " seed=" << ds.seed << " model=" << (ds.model_name.empty() ? "-" : ds.model_name)
     << "\n";
  for (const auto& rec : ds.records) {
    for (std::size_t i = 0; i < rec.z.size(); ++i)
      os << (i ? " " : "") << format_double(rec.z[i]);
    os << " ; " << (rec.delta ? 1 : 0) << " ; " << format_double(rec.hit_time)
       << " ; ";
    for (std::size_t i = 0; i < rec.states.size(); ++i)
      os << (i ? "," : "") << rec.states[i] + 1;
    os << "\n";
  }
}

void write_dataset_file(const std::string& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write dataset file '" + path + "'");
  write_dataset(out, ds);
}

Dataset read_dataset(std::istream& is, const std::string& origin) {
  Dataset ds;
  std::string line;
  int lineno = 0;

  if (!std::getline(is, line))
    throw ParseError(origin + ": empty dataset file");
  ++lineno;
  {
    std::istringstream hdr(line);
    std::string magic, tag;
    hdr >> magic >> tag;
    if (magic != "#" || tag != "fht-dataset")
      throw ParseError(origin + ":1: not a dataset file (bad header)");
    std::string kv;
    int version = -1;
    while (hdr >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        if (kv.rfind("v", 0) == 0)
          version = static_cast<int>(parse_long(kv.substr(1), origin + ":1"));
        continue;
      }
      const std::string key = kv.substr(0, eq);
      const std::string value = kv.substr(eq + 1);
      if (key == "p") ds.covariate_dim = static_cast<int>(parse_long(value, origin + ":1"));
      else if (key == "states") ds.n_states = static_cast<int>(parse_long(value, origin + ":1"));
      else if (key == "seed") ds.seed = static_cast<std::uint64_t>(parse_long(value, origin + ":1"));
      else if (key == "model" && value != "-") ds.model_name = value;
    }
    if (version != kDatasetFormatVersion)
      throw ParseError(origin + ":1: unsupported dataset version");
  }

  while (std::getline(is, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto fields = split(body, ';');
    if (fields.size() != 4)
      throw ParseError(where + ": expected 4 ';'-separated fields, got " +
                       std::to_string(fields.size()));
    ObservationRecord rec;
    {
      std::istringstream zs(fields[0]);
      double v;
      while (zs >> v) {
        if (!std::isfinite(v))
          throw ParseError(where + ": covariate must be finite");
        rec.z.push_back(v);
      }
      if (static_cast<int>(rec.z.size()) != ds.covariate_dim)
        throw ParseError(where + ": expected " + std::to_string(ds.covariate_dim) +
                         " covariate values");
    }
    const long d = parse_long(fields[1], where);
    if (d != 0 && d != 1) throw ParseError(where + ": delta must be 0 or 1");
    rec.delta = d == 1;
    rec.hit_time = parse_double(fields[2], where);
    if (!(rec.hit_time >= 0.0) || !std::isfinite(rec.hit_time))
      throw ParseError(where + ": hit_time must be finite and >= 0");
    for (const std::string& cell : split(trim(fields[3]), ',')) {
      const long label = parse_long(cell, where);
      if (label < 1) throw ParseError(where + ": state labels are 1-based");
      if (label > 100000)
        throw ParseError(where + ": state label implausibly large");
      rec.states.push_back(static_cast<int>(label) - 1);
    }
    if (rec.states.empty()) throw ParseError(where + ": empty state sequence");
    rec.m = static_cast<int>(rec.states.size()) - 1;
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

Dataset read_dataset_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open dataset file '" + path + "'");
  return read_dataset(in, path);
}

}  // namespace fht
