#pragma once

#include <string>

#include "detector.hpp"
#include "evaluate.hpp"
#include "ingest.hpp"
#include "simulator.hpp"

namespace scadatd {

// Artifact writers and loaders. Every document carries a format name and an
// integer version; loaders reject anything they do not recognize. Doubles
// are written with shortest round-trip formatting throughout, so identical
// inputs produce byte-identical artifacts.

// Build artifacts: <dir>/build.json plus <dir>/tensor.coo.
void save_build(const TensorBuild& build, const std::string& dir);
TensorBuild load_build(const std::string& dir);

void save_detector(const Detector& detector, const std::string& path);
Detector load_detector(const std::string& path);

void save_profile(const SystemProfile& profile, const std::string& path);
SystemProfile load_profile(const std::string& path);

// metrics document plus the two curve CSVs (fpr,tpr / recall,precision).
// model_tag lands in the document when non-empty.
void save_metrics(const EvaluationReport& report, const std::string& metrics_path,
                  const std::string& roc_csv_path, const std::string& pr_csv_path,
                  const std::string& model_tag = "");

void save_sweep(const SweepResult& sweep, const std::string& path);

// Aggregates previously written metrics documents into one summary.
void write_report(const std::vector<std::string>& metrics_paths, const std::string& out_path);

} // namespace scadatd
