#include "mecplan/lp_format.h"

#include <cmath>
#include <cstdio>

namespace mecplan {
namespace {

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Appends " + 3 x" style terms, wrapping long expressions.
void AppendTerms(std::string& out, const std::vector<lp::Entry>& terms,
                 const MilpModel& model) {
  int on_line = 0;
  bool first = true;
  for (const lp::Entry& e : terms) {
    if (e.value == 0.0) continue;
    if (on_line == 6) {
      out += "\n   ";
      on_line = 0;
    }
    out += e.value < 0 ? " - " : (first ? " " : " + ");
    const double mag = std::abs(e.value);
    if (mag != 1.0) out += Num(mag) + " ";
    out += model.variables()[e.index].name;
    first = false;
    ++on_line;
  }
  if (first) out += " 0 " + model.variables().front().name;
}

}  // namespace

std::string WriteLpFormat(const MilpModel& model) {
  std::string out = "\\ mecplan step-one model\n";
  out += "\\ variables: " + std::to_string(model.num_variables()) +
         ", rows: " + std::to_string(model.rows().size()) + "\n";
  out += "Minimize\n obj:";
  std::vector<lp::Entry> objective;
  for (int j = 0; j < model.num_variables(); ++j) {
    if (model.variables()[j].cost != 0.0) {
      objective.push_back({j, model.variables()[j].cost});
    }
  }
  if (model.num_variables() == 0) {
    out += " 0\n";
  } else {
    AppendTerms(out, objective, model);
    out += "\n";
  }

  out += "Subject To\n";
  for (const MilpRow& row : model.rows()) {
    if (row.entries.empty()) continue;
    const bool has_lo = std::isfinite(row.lower);
    const bool has_hi = std::isfinite(row.upper);
    auto emit = [&](const std::string& name, const char* sense, double rhs) {
      out += " " + name + ":";
      AppendTerms(out, row.entries, model);
      out += std::string(" ") + sense + " " + Num(rhs) + "\n";
    };
    if (has_lo && has_hi && row.lower == row.upper) {
      emit(row.name, "=", row.lower);
    } else if (has_lo && has_hi) {
      emit(row.name + "_lo", ">=", row.lower);
      emit(row.name + "_hi", "<=", row.upper);
    } else if (has_hi) {
      emit(row.name, "<=", row.upper);
    } else if (has_lo) {
      emit(row.name, ">=", row.lower);
    }
  }

  out += "Bounds\n";
  for (const MilpVariable& v : model.variables()) {
    if (v.binary) continue;
    out += " " + Num(v.lower) + " <= " + v.name + " <= " + Num(v.upper) + "\n";
  }
  out += "Binaries\n";
  for (const MilpVariable& v : model.variables()) {
    if (v.binary) out += " " + v.name + "\n";
  }
  out += "End\n";
  return out;
}

}  // namespace mecplan
