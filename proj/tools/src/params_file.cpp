#include <nwidths/cli.hpp>

#include <json.hpp>

#include <array>
#include <fstream>
#include <sstream>

namespace nwidths::cli {

namespace {

using nlohmann::json;

constexpr std::array<const char*, 5> kConcreteOnly{"r", "d", "beta", "sigma", "lambda"};
constexpr std::array<const char*, 5> kAbstractOnly{"s_star", "gamma_star", "mu_star", "alpha_star", "k_star"};
constexpr std::array<const char*, 3> kShared{"p0", "p1", "q"};

std::string text_of(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ParseError(std::string("missing key \"") + key + "\"");
  const json& v = doc.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ParseError(std::string("key \"") + key + "\" must be an integer or an \"a/b\" string");
}

Rational rational_of(const json& doc, const char* key) {
  try {
    return parse_rational(text_of(doc, key));
  } catch (const ParseError& e) {
    throw ParseError(std::string("key \"") + key + "\": " + e.what());
  }
}

long long integer_of(const json& doc, const char* key) {
  const Rational v = rational_of(doc, key);
  if (denominator(v) != 1) throw ParseError(std::string("key \"") + key + "\" must be an integer");
  return numerator(v).convert_to<long long>();
}

Extended exponent_of(const json& doc, const char* key) {
  try {
    return Extended::parse(text_of(doc, key));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("key \"") + key + "\": " + e.what());
  }
}

Rational inv_q_of(const json& doc) {
  const Extended q = exponent_of(doc, "q");
  if (q.is_infinite()) throw ParseError("key \"q\": q must be finite");
  return q.inv();
}

template <std::size_t N>
bool any_of_keys(const json& doc, const std::array<const char*, N>& keys) {
  for (const char* k : keys)
    if (doc.contains(k)) return true;
  return false;
}

template <std::size_t N>
bool listed(const std::string& key, const std::array<const char*, N>& keys) {
  for (const char* k : keys)
    if (key == k) return true;
  return false;
}

}  // namespace

AbstractParams ParamsFile::abstract() const {
  if (const auto* c = std::get_if<ConcreteParams>(&tuple)) return map_concrete(*c);
  return std::get<AbstractParams>(tuple);
}

ParamsFile parse_params_file(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("params file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("params file must hold a JSON object");
  for (const auto& item : doc.items()) {
    const std::string& key = item.key();
    if (!listed(key, kConcreteOnly) && !listed(key, kAbstractOnly) && !listed(key, kShared))
      throw ParseError("unknown key \"" + key + "\"");
  }
  const bool concrete = any_of_keys(doc, kConcreteOnly);
  const bool abstract = any_of_keys(doc, kAbstractOnly);
  if (concrete == abstract)
    throw ParseError(concrete ? "params file mixes concrete and abstract keys"
                              : "params file holds neither a concrete nor an abstract tuple");

  ParamsFile out;
  if (concrete) {
    ConcreteParams c;
    c.r = integer_of(doc, "r");
    c.d = integer_of(doc, "d");
    c.p0 = exponent_of(doc, "p0");
    c.p1 = exponent_of(doc, "p1");
    c.inv_q = inv_q_of(doc);
    c.beta = rational_of(doc, "beta");
    c.sigma = rational_of(doc, "sigma");
    c.lambda_w = rational_of(doc, "lambda");
    out.tuple = c;
  } else {
    AbstractParams a;
    a.p0 = exponent_of(doc, "p0");
    a.p1 = exponent_of(doc, "p1");
    a.inv_q = inv_q_of(doc);
    a.s_star = rational_of(doc, "s_star");
    a.gamma_star = rational_of(doc, "gamma_star");
    a.mu_star = rational_of(doc, "mu_star");
    a.alpha_star = rational_of(doc, "alpha_star");
    a.k_star = doc.contains("k_star") ? integer_of(doc, "k_star") : 1;
    if (a.k_star < 1) throw ParseError("key \"k_star\" must be at least 1");
    out.tuple = a;
  }
  return out;
}

ParamsFile load_params_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open params file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_params_file(buf.str());
}

}  // namespace nwidths::cli
