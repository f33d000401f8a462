#pragma once

// JSON and CSV emission for scenario reports. Numbers are written with
// shortest round-trip formatting and no locale; non-finite values become the
// strings "inf", "-inf" and "nan".

#include <string>
#include <vector>

#include "convolab/coercion.hpp"
#include "convolab/counterexamples.hpp"
#include "convolab/dcclasses.hpp"
#include "convolab/mollifiers.hpp"
#include "convolab/spectra.hpp"
#include "convolab/symbols.hpp"
#include "convolab/weights.hpp"
#include "json.hpp"

namespace convolab::report {

using Json = nlohmann::ordered_json;

Json num(double v);
Json nums(const std::vector<double>& v);
Json opt(const std::optional<double>& v);
Json verdict(Verdict v);

Json to_json(const SlowDecreaseReport& r);
Json to_json(const MembershipReport& r);
Json to_json(const DominationVerdict& r);
Json to_json(const SlowVariationReport& r);
Json to_json(const UnitNormReport& r);
Json to_json(const UnitBoundReport& r);
Json to_json(const Lemma1Report& r);
Json to_json(const AsymptoticSum& r);
Json to_json(const SandwichReport& r);
Json to_json(const StarCertificate& r);
Json to_json(const CounterexampleReport& r);
Json to_json(const CoercionReport& r);

// Fixed two-space indentation, trailing newline.
std::string dump(const Json& j);

// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  void add_row(std::vector<std::string> r);
  std::string str() const;
};

// Column table of doubles; all columns must have the same length.
CsvTable columns_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& cols);

std::string csv_number(double v);
std::string csv_escape(const std::string& s);

}  // namespace convolab::report
