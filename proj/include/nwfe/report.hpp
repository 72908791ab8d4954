#pragma once

#include <iosfwd>

#include <json.hpp>

#include "nwfe/evaluation.hpp"

namespace nwfe {

nlohmann::json to_json(const CvReport& r);
nlohmann::json to_json(const SweepReport& r);
nlohmann::json to_json(const LearningCurve& c);
nlohmann::json to_json(const TimingTable& t);
nlohmann::json to_json(const OracleCheck& c);

// Flat CSV, one row per fold / dimension / checkpoint / chunk. Column sets are
// listed in the README.
void write_csv(const CvReport& r, std::ostream& out);
void write_csv(const SweepReport& r, std::ostream& out);
void write_csv(const LearningCurve& c, std::ostream& out);
void write_csv(const TimingTable& t, std::ostream& out);

}  // namespace nwfe
