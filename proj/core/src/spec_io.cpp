#include <charconv>
#include <cmath>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "lelong/current_model.hpp"
#include "lelong/errors.hpp"
#include "lelong/serialize.hpp"

namespace lelong {

namespace {

using nlohmann::json;

// Replaces "$name" strings anywhere in the document.
void substitute(json& node, const SpecParameters& params) {
  if (node.is_string()) {
    const auto& text = node.get_ref<const std::string&>();
    if (!text.empty() && text.front() == '$') {
      auto it = params.find(std::string_view(text).substr(1));
      if (it == params.end()) throw InputError("unbound parameter " + text);
      node = it->second;
    }
  } else if (node.is_array() || node.is_object()) {
    for (auto& child : node) substitute(child, params);
  }
}

double number(const json& node, std::string_view what) {
  if (!node.is_number()) throw InputError(std::string(what) + " must be a number");
  return node.get<double>();
}

int integer(const json& node, std::string_view what) {
  if (!node.is_number_integer()) throw InputError(std::string(what) + " must be an integer");
  return node.get<int>();
}

std::vector<std::pair<double, double>> pairs(const json& node, std::string_view what) {
  if (!node.is_array()) throw InputError(std::string(what) + " must be an array of pairs");
  std::vector<std::pair<double, double>> out;
  for (const auto& item : node) {
    if (!item.is_array() || item.size() != 2) {
      throw InputError(std::string(what) + " entries must be [x, y] pairs");
    }
    out.emplace_back(number(item[0], what), number(item[1], what));
  }
  return out;
}

void reject_unknown(const json& doc, const std::set<std::string>& known, std::string_view what) {
  for (const auto& [key, _] : doc.items()) {
    if (!known.contains(key)) throw InputError(std::string(what) + ": unknown field '" + key + "'");
  }
}

json load(std::string_view text, const SpecParameters& params) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("spec must be a JSON object");
  substitute(doc, params);
  return doc;
}

std::vector<double> split_numbers(std::string_view text, char sep, const SpecParameters& params) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = std::min(text.find(sep, pos), text.size());
    const auto piece = text.substr(pos, next - pos);
    if (piece.size() > 1 && piece.front() == '$') {
      auto it = params.find(piece.substr(1));
      if (it == params.end()) throw InputError("unbound parameter " + std::string(piece));
      out.push_back(it->second);
      pos = next + 1;
      continue;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
    if (ec != std::errc{} || ptr != piece.data() + piece.size() || piece.empty()) {
      throw InputError("bad number '" + std::string(piece) + "' in weight spec");
    }
    out.push_back(v);
    pos = next + 1;
  }
  return out;
}

Weight weight_from_fields(std::string_view kind, std::optional<double> k, std::vector<double> b,
                          std::vector<cplx> center, std::optional<double> radius,
                          std::optional<double> scale, const Domain& domain) {
  Weight w = [&] {
    if (kind == "pow") return Weight::isotropic_power(domain, k.value_or(1.0));
    if (kind == "aniso") return Weight::anisotropic(domain, std::move(b));
    if (kind == "shifted") return Weight::shifted(domain, std::move(center), k.value_or(1.0));
    throw InputError("unknown weight kind '" + std::string(kind) + "'");
  }();
  if (kind == "aniso" && k) w = w.power(*k);
  if (scale) w = w.scaled(*scale);
  if (radius) w = w.with_radius(*radius, domain);
  return w;
}

}  // namespace

ModelCurrent parse_current(std::string_view json_text, const SpecParameters& params) {
  const json doc = load(json_text, params);
  reject_unknown(doc,
                 {"n", "kind", "subspace_dim", "bidim", "ball_radius", "monomials", "log_coeff",
                  "log_powers"},
                 "current spec");
  if (!doc.contains("n")) throw InputError("current spec: missing 'n'");
  Domain domain;
  domain.ambient_dim = integer(doc["n"], "n");
  if (doc.contains("ball_radius")) domain.ball_radius = number(doc["ball_radius"], "ball_radius");

  CurrentKind kind = CurrentKind::Subspace;
  if (doc.contains("kind")) {
    const auto& k = doc["kind"];
    if (k == "subspace") {
      kind = CurrentKind::Subspace;
    } else if (k == "smooth") {
      kind = CurrentKind::Smooth;
    } else {
      throw InputError("current spec: kind must be \"subspace\" or \"smooth\"");
    }
  }
  int p = 0;
  if (doc.contains("subspace_dim")) p = integer(doc["subspace_dim"], "subspace_dim");
  if (doc.contains("bidim")) p = integer(doc["bidim"], "bidim");
  if (p == 0) throw InputError("current spec: missing 'subspace_dim'");

  std::vector<Monomial> mons;
  if (doc.contains("monomials")) {
    for (auto [c, a] : pairs(doc["monomials"], "monomials")) mons.push_back({c, a});
  }
  double log_coeff = doc.contains("log_coeff") ? number(doc["log_coeff"], "log_coeff") : 0.0;
  std::vector<LogPower> lps;
  if (doc.contains("log_powers")) {
    for (auto [e, d] : pairs(doc["log_powers"], "log_powers")) lps.push_back({e, d});
  }

  ModelCurrent current(kind, domain, p, RadialDensity(std::move(mons), log_coeff, std::move(lps)));
  if (!current.is_psh()) {
    throw InputError("current is not plurisubharmonic: " + current.psh_report().message);
  }
  return current;
}

Weight parse_weight(std::string_view text, const Domain& domain, const SpecParameters& params) {
  std::string kind;
  std::optional<double> k;
  std::optional<double> radius;
  std::optional<double> scale;
  std::vector<double> b;
  std::vector<cplx> center;

  const auto first = text.find_first_not_of(" \t\n");
  if (first != std::string_view::npos && text[first] == '{') {
    const json doc = load(text, params);
    reject_unknown(doc, {"kind", "k", "b", "center", "R", "scale"}, "weight spec");
    if (!doc.contains("kind") || !doc["kind"].is_string()) throw InputError("weight spec: missing 'kind'");
    kind = doc["kind"].get<std::string>();
    if (doc.contains("k")) k = number(doc["k"], "k");
    if (doc.contains("R")) radius = number(doc["R"], "R");
    if (doc.contains("scale")) scale = number(doc["scale"], "scale");
    if (doc.contains("b")) {
      if (!doc["b"].is_array()) throw InputError("weight spec: b must be an array");
      for (const auto& v : doc["b"]) b.push_back(number(v, "b"));
    }
    if (doc.contains("center")) {
      for (auto [re, im] : pairs(doc["center"], "center")) center.emplace_back(re, im);
    }
  } else {
    const auto colon = text.find(':');
    kind = std::string(text.substr(0, colon));
    std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    // Fields are comma separated, but b's list also uses commas: a token
    // without '=' continues the previous field.
    std::vector<std::pair<std::string, std::string>> fields;
    std::size_t pos = 0;
    while (!rest.empty() && pos <= rest.size()) {
      const auto next = std::min(rest.find(',', pos), rest.size());
      const auto tok = rest.substr(pos, next - pos);
      const auto eq = tok.find('=');
      if (eq == std::string_view::npos) {
        if (fields.empty()) throw InputError("bad weight field '" + std::string(tok) + "'");
        fields.back().second += "," + std::string(tok);
      } else {
        fields.emplace_back(std::string(tok.substr(0, eq)), std::string(tok.substr(eq + 1)));
      }
      pos = next + 1;
    }
    auto scalar = [&params](const std::string& key, const std::string& value) {
      const auto v = split_numbers(value, ',', params);
      if (v.size() != 1) throw InputError("weight field '" + key + "' takes one number");
      return v.front();
    };
    for (const auto& [key, value] : fields) {
      if (key == "k") {
        k = scalar(key, value);
      } else if (key == "b") {
        b = split_numbers(value, ',', params);
      } else if (key == "R") {
        radius = scalar(key, value);
      } else if (key == "s") {
        scale = scalar(key, value);
      } else if (key == "c") {
        std::size_t cp = 0;
        while (cp <= value.size()) {
          const auto nx = std::min(value.find(';', cp), value.size());
          const auto parts = split_numbers(std::string_view(value).substr(cp, nx - cp), ':', params);
          if (parts.size() != 2) throw InputError("centre entries must be RE:IM");
          center.emplace_back(parts[0], parts[1]);
          cp = nx + 1;
        }
      } else {
        throw InputError("unknown weight field '" + key + "'");
      }
    }
  }
  return weight_from_fields(kind, k, std::move(b), std::move(center), radius, scale, domain);
}

json json_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

json describe(const ModelCurrent& current) {
  json doc;
  doc["n"] = current.ambient_dim();
  doc["kind"] = to_string(current.kind());
  doc["subspace_dim"] = current.bidim();
  doc["ball_radius"] = current.domain().ball_radius;
  const auto& u = current.density();
  json mons = json::array();
  for (const auto& m : u.monomials()) mons.push_back({m.coeff, m.exponent});
  doc["monomials"] = mons;
  doc["log_coeff"] = u.log_coeff();
  json lps = json::array();
  for (const auto& lp : u.log_powers()) lps.push_back({lp.coeff, lp.delta});
  doc["log_powers"] = lps;
  return doc;
}

json describe(const Weight& weight) {
  json doc;
  switch (weight.kind()) {
    case WeightKind::IsotropicPower:
      doc["kind"] = "pow";
      doc["k"] = weight.exponent();
      break;
    case WeightKind::Anisotropic:
      doc["kind"] = "aniso";
      doc["b"] = weight.b();
      if (weight.exponent() != 1.0) doc["k"] = weight.exponent();
      break;
    case WeightKind::Shifted: {
      doc["kind"] = "shifted";
      doc["k"] = weight.exponent();
      json c = json::array();
      for (const auto& z : weight.center()) c.push_back({z.real(), z.imag()});
      doc["center"] = c;
      break;
    }
  }
  if (weight.scale() != 1.0) doc["scale"] = weight.scale();
  doc["R"] = weight.domain_radius();
  return doc;
}

}  // namespace lelong
