#include "growent/alphabet.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "growent/error.hpp"
#include "growent/numeric.hpp"

namespace growent {

namespace {

double raw_weight(FamilyKind kind, std::size_t position) {
  const double i = static_cast<double>(position);
  switch (kind) {
    case FamilyKind::Harmonic:
      return 1.0 / i;
    case FamilyKind::ExpGeometric:
      return std::exp(-i);
    case FamilyKind::LogHarmonic: {
      const double j = i + 1.0;  // symbols start at 2
      return 1.0 / (j * std::log(j));
    }
    case FamilyKind::Uniform:
      return 1.0;
    case FamilyKind::Custom:
      break;
  }
  throw InvalidArgument("raw_weight: custom family has no weight rule");
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

Pmf build_family(const FamilySpec& spec) {
  if (spec.kind == FamilyKind::Custom) {
    return validate_pmf(spec.custom_probs);
  }
  if (spec.size == 0) {
    throw InvalidArgument("build_family: K must be positive");
  }
  if (spec.kind == FamilyKind::LogHarmonic && spec.size < 2) {
    throw InvalidArgument("build_family: logharmonic requires K >= 2");
  }
  if (spec.kind == FamilyKind::ExpGeometric && spec.size > kMaxExpGeometricSize) {
    throw InvalidArgument("build_family: expgeometric weight e^-" +
                          std::to_string(spec.size) +
                          " underflows; K is capped at " +
                          std::to_string(kMaxExpGeometricSize));
  }

  std::vector<double> weights(spec.size);
  NeumaierSum total;
  for (std::size_t i = 0; i < spec.size; ++i) {
    weights[i] = raw_weight(spec.kind, i + 1);
    if (!std::isnormal(weights[i])) {
      throw InvalidArgument("build_family: weight at position " + std::to_string(i + 1) +
                            " is not a positive normal double");
    }
    total += weights[i];
  }
  const double c = total.value();
  for (auto& w : weights) w /= c;
  return Pmf(std::move(weights), c);
}

Pmf validate_pmf(std::span<const double> probs) {
  if (probs.empty()) {
    throw InvalidArgument("validate_pmf: empty probability vector");
  }
  NeumaierSum total;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (!std::isfinite(p) || !(p > 0.0)) {
      throw InvalidArgument("validate_pmf: entry " + std::to_string(i) +
                            " is not strictly positive (full support required)");
    }
    total += p;
  }
  const double s = total.value();
  if (std::abs(s - 1.0) > kPmfInputTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "validate_pmf: probabilities sum to " << s << ", not 1";
    throw InvalidArgument(msg.str());
  }
  std::vector<double> out(probs.begin(), probs.end());
  for (auto& p : out) p /= s;
  return Pmf(std::move(out), std::nullopt);
}

std::string_view family_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Harmonic: return "harmonic";
    case FamilyKind::ExpGeometric: return "expgeometric";
    case FamilyKind::LogHarmonic: return "logharmonic";
    case FamilyKind::Uniform: return "uniform";
    case FamilyKind::Custom: return "custom";
  }
  return "unknown";
}

FamilyKind parse_family_kind(std::string_view name) {
  const std::string n = lower(trim(name));
  if (n == "harmonic") return FamilyKind::Harmonic;
  if (n == "expgeometric" || n == "exp") return FamilyKind::ExpGeometric;
  if (n == "logharmonic") return FamilyKind::LogHarmonic;
  if (n == "uniform") return FamilyKind::Uniform;
  if (n == "custom") return FamilyKind::Custom;
  throw InvalidArgument("unknown family '" + std::string(name) + "'");
}

FamilySpec parse_family(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidArgument("family spec '" + std::string(text) +
                          "' must look like <family>:<K> or custom:<path>");
  }
  FamilySpec spec;
  spec.kind = parse_family_kind(text.substr(0, colon));
  const std::string arg = trim(text.substr(colon + 1));
  if (spec.kind == FamilyKind::Custom) {
    spec.custom_probs = load_probabilities(arg);
    spec.size = spec.custom_probs.size();
    return spec;
  }
  std::size_t k = 0;
  const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), k);
  if (ec != std::errc() || ptr != arg.data() + arg.size() || k == 0) {
    throw InvalidArgument("family spec '" + std::string(text) + "': K must be a positive integer");
  }
  spec.size = k;
  return spec;
}

std::vector<double> load_probabilities(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidArgument("cannot open probability file '" + path.string() + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string content = buffer.str();

  const auto first = content.find_first_not_of(" \t\r\n");
  if (path.extension() == ".json" || (first != std::string::npos && content[first] == '[')) {
    try {
      const auto j = nlohmann::json::parse(content);
      if (!j.is_array()) throw InvalidArgument("expected a JSON array");
      std::vector<double> out;
      out.reserve(j.size());
      for (const auto& v : j) {
        if (!v.is_number()) throw InvalidArgument("non-numeric entry in JSON array");
        out.push_back(v.get<double>());
      }
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument("'" + path.string() + "': " + e.what());
    }
  }

  std::vector<double> out;
  std::istringstream lines(content);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      throw InvalidArgument("'" + path.string() + "' line " + std::to_string(lineno) +
                            ": not a number");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace growent
