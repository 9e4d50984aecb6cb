#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ptb/complexity.hpp"
#include "ptb/decision.hpp"
#include "ptb/envelope.hpp"
#include "ptb/examples.hpp"
#include "ptb/levelset.hpp"
#include "ptb/measure.hpp"
#include "ptb/oracle.hpp"
#include "ptb/tabulated.hpp"

namespace ptb {

inline constexpr const char* kSpecVersion = "1.0";

// ---- CSV ----

// Header: y columns then z columns, named as in the model. Every field must equal an
// atom label exactly (shortest round-trip decimal form).
Sample read_sample_csv(const SupportSpec& support, std::istream& in);
void write_sample_csv(const SupportSpec& support, const Sample& sample, std::ostream& out);

// Header: y columns, z columns, weight. Cells that are not listed get weight 0.
WeightedMeasure read_weights_csv(const SupportSpec& support, std::istream& in);
void write_weights_csv(const SupportSpec& support, const WeightedMeasure& measure, std::ostream& out);

// One positive real per line, optionally under a header line "delta".
std::vector<double> read_schedule_csv(std::istream& in);

void write_curve_csv(const EnvelopeCurve& curve, std::ostream& out);
void write_trace_csv(const StepBound& trace, std::ostream& out);

// ---- model documents ----

struct ModelDocument {
  std::string kind;  // "program_evaluation", "sdc" or "tabulated"
  std::optional<ProgramEvalConfig> program_evaluation;
  std::optional<SdcConfig> sdc;
  std::optional<TabulatedModelSpec> tabulated;
  std::optional<double> mu_star;  // override, checked against the penalty floor
};

ModelDocument parse_model_document(const std::string& text);
std::string model_document_json(const ModelDocument& doc);

// Atom lists of the model the document describes. Does not need a plug-in tau.
SupportSpec document_support(const ModelDocument& doc);
// Throws ContractError for an SDC document without tau_hat.
StructuralModel build_model(const ModelDocument& doc);

// Every table of a model, for the "tabulated" document kind. BudgetError above max_entries.
TabulatedModelSpec tabulate_model(const StructuralModel& model, double max_entries = 2e7);

// Truth documents: {"kind": "program_evaluation" | "sdc", "config": {...}, ...law fields}.
std::unique_ptr<Truth> parse_truth_document(const std::string& text);

// ---- JSON reports (each carries spec_version) ----

std::string curve_json(const StructuralModel& model, const EnvelopeCurve& curve);
std::string certificate_json(const Certificate& c);
std::string decision_json(const StructuralModel& model, Index gamma, double epsilon, const std::vector<double>& values);
std::string complexity_json(const ClassComplexity& c, std::uint64_t seed, std::size_t n);
std::string levelset_json(const StructuralModel& model, const LevelSetResult& r);
std::string oracle_json(const StructuralModel& model, const std::vector<OracleBounds>& bounds);
std::string validation_json(const ValidationReport& r);

std::string read_file(const std::string& path);

}  // namespace ptb
