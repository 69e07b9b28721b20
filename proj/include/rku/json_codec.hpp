#pragma once

#include <nlohmann/json.hpp>

#include "rku/domain.hpp"
#include "rku/store.hpp"

// One JSON shape per type, shared by the store files and the HTTP API.
// Decoding throws nlohmann::json exceptions or rku::Error(Validation /
// MalformedNota) on bad values; callers translate to their own error.

namespace rku {

void to_json(nlohmann::json& j, const Customer& c);
void from_json(const nlohmann::json& j, Customer& c);
void to_json(nlohmann::json& j, const DeviceInfo& d);
void from_json(const nlohmann::json& j, DeviceInfo& d);
void to_json(nlohmann::json& j, const StatusEvent& e);
void from_json(const nlohmann::json& j, StatusEvent& e);
void to_json(nlohmann::json& j, const ServiceOrder& o);
ServiceOrder order_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const Complaint& c);
void from_json(const nlohmann::json& j, Complaint& c);
void to_json(nlohmann::json& j, const FaqEntry& f);
void from_json(const nlohmann::json& j, FaqEntry& f);
void to_json(nlohmann::json& j, const Account& a);
void from_json(const nlohmann::json& j, Account& a);

}  // namespace rku
