#pragma once

#include <string>

#include "routechoice/choice.hpp"
#include "routechoice/clustering.hpp"
#include "routechoice/pipeline.hpp"
#include "routechoice/segmentation.hpp"

namespace routechoice {

// JSON round trips. Output is deterministic (ordered keys, shortest
// round-trip doubles); parse errors raise DataError.

std::string cluster_model_to_json(const RouteClusterModel& model);
RouteClusterModel cluster_model_from_json(const std::string& text);

std::string segmentation_to_json(const Segmentation& seg);
Segmentation segmentation_from_json(const std::string& text);

std::string choice_model_to_json(const ChoiceModel& model);
ChoiceModel choice_model_from_json(const std::string& text);

std::string bundle_to_json(const TrainedBundle& bundle);
TrainedBundle bundle_from_json(const std::string& text);

}  // namespace routechoice
