#pragma once

#include <string>

#include "klrfs/pipeline.hpp"

namespace klrfs {

inline constexpr int kReportSchemaVersion = 1;

std::string ReportJson(const ExperimentReport& report);
// method,p,delta,repeat,auc,red
std::string RecordsCsv(const ExperimentReport& report);
// method,p,delta,runs,failures,auc_mean,auc_std,red_mean,red_std
std::string AggregatesCsv(const ExperimentReport& report);

std::string SolutionJson(const SelectOutput& selection, const ExperimentConfig& config);
// One selected feature name per line, selection order.
std::string SolutionFeatureList(const SelectOutput& selection);

void WriteTextFile(const std::string& path, const std::string& contents);

}  // namespace klrfs
