#include "fpprep/baselines.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>

#include "fpprep/error.hpp"
#include "fpprep/numeric_text.hpp"

namespace fpprep {

namespace {

struct Numeral {
  bool negative = false;
  std::string integer;   // digits before the point
  std::string fraction;  // digits after the point
};

Numeral split_numeral(const std::string& token) {
  Numeral n;
  std::size_t i = 0;
  if (i < token.size() && (token[i] == '+' || token[i] == '-')) {
    n.negative = token[i] == '-';
    ++i;
  }
  const auto dot = token.find('.', i);
  n.integer = token.substr(i, dot == std::string::npos ? std::string::npos : dot - i);
  if (dot != std::string::npos) n.fraction = token.substr(dot + 1);

  auto all_digits = [](const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if ((n.integer.empty() && n.fraction.empty()) || !all_digits(n.integer) ||
      !all_digits(n.fraction)) {
    throw Error(ErrorCode::parse, "not a decimal numeral: '" + token + "'");
  }
  return n;
}

// Digits of |token| * 10^power with leading zeros stripped ("0" for zero).
std::string shifted_digits(const Numeral& n, int power) {
  std::string digits = n.integer + n.fraction;
  digits.append(static_cast<std::size_t>(power) - n.fraction.size(), '0');
  const auto first = digits.find_first_not_of('0');
  return first == std::string::npos ? "0" : digits.substr(first);
}

double digits_value(const std::string& digits) {
  // Anything longer than 8 digits is already past 2^24.
  if (digits.size() > 8) return kExactIntegerLimit * 10.0;
  return static_cast<double>(std::stoll(digits));
}

}  // namespace

int fractional_digits(const std::string& token) {
  return static_cast<int>(split_numeral(token).fraction.size());
}

ScalePlan select_scale(std::span<const std::string> tokens) {
  std::vector<Numeral> parsed;
  parsed.reserve(tokens.size());
  int power = 0;
  for (const auto& t : tokens) {
    parsed.push_back(split_numeral(t));
    power = std::max(power, static_cast<int>(parsed.back().fraction.size()));
  }
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    if (digits_value(shifted_digits(parsed[i], power)) > kExactIntegerLimit) {
      throw Error(ErrorCode::lossless_infeasible,
                  "lossless scaling by 10^" + std::to_string(power) + " overflows the exact "
                  "integer range at token '" + tokens[i] + "'");
    }
  }
  return ScalePlan{power, true};
}

ScalePlan identity_scale() { return ScalePlan{0, false}; }

std::vector<float> apply_scale(std::span<const std::string> tokens, const ScalePlan& plan) {
  std::vector<float> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!plan.scaled_are_integers) {
      out.push_back(parse_float(t));
      continue;
    }
    const auto n = split_numeral(t);
    if (static_cast<int>(n.fraction.size()) > plan.power) {
      throw Error(ErrorCode::lossless_infeasible,
                  "token '" + t + "' has more fractional digits than the plan allows");
    }
    const double v = digits_value(shifted_digits(n, plan.power));
    if (v > kExactIntegerLimit) {
      throw Error(ErrorCode::lossless_infeasible, "scaled token '" + t + "' exceeds 2^24");
    }
    out.push_back(static_cast<float>(n.negative && v != 0.0 ? -v : v));
  }
  return out;
}

std::vector<std::string> invert_scale(std::span<const float> values, const ScalePlan& plan) {
  std::vector<std::string> out;
  out.reserve(values.size());
  for (float v : values) {
    if (!plan.scaled_are_integers) {
      out.push_back(format_float(v));
      continue;
    }
    if (!(std::fabs(v) <= kExactIntegerLimit) || v != std::trunc(v)) {
      throw Error(ErrorCode::invalid_argument, "invert_scale: value is not a scaled integer");
    }
    const auto magnitude = static_cast<std::int64_t>(std::fabs(v));
    std::string digits = std::to_string(magnitude);
    const auto power = static_cast<std::size_t>(plan.power);
    if (digits.size() <= power) digits.insert(0, power + 1 - digits.size(), '0');
    std::string integer = digits.substr(0, digits.size() - power);
    std::string fraction = digits.substr(digits.size() - power);
    while (!fraction.empty() && fraction.back() == '0') fraction.pop_back();

    std::string text = (magnitude != 0 && v < 0.0f) ? "-" : "";
    text += integer;
    if (!fraction.empty()) text += "." + fraction;
    out.push_back(std::move(text));
  }
  return out;
}

}  // namespace fpprep
