#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "physq/types.hpp"

namespace physq {

using nlohmann::json;

void to_json(json& j, const Vec2& v);
void from_json(const json& j, Vec2& v);
void to_json(json& j, const ObjectSpec& o);
void from_json(const json& j, ObjectSpec& o);
void to_json(json& j, const BodyState& s);
void from_json(const json& j, BodyState& s);
void to_json(json& j, const EventRecord& e);
void from_json(const json& j, EventRecord& e);
void to_json(json& j, const ContactRecord& c);
void from_json(const json& j, ContactRecord& c);
void to_json(json& j, const WallContact& c);
void from_json(const json& j, WallContact& c);
void to_json(json& j, const SceneRecord& r);
void from_json(const json& j, SceneRecord& r);
void to_json(json& j, const VideoSet& s);
void from_json(const json& j, VideoSet& s);
void to_json(json& j, const PropertyGraph& g);
void from_json(const json& j, PropertyGraph& g);
void to_json(json& j, const Choice& c);
void from_json(const json& j, Choice& c);
void to_json(json& j, const Question& q);
void from_json(const json& j, Question& q);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j,
                     int indent = -1);

// FNV-1a, stable across platforms; used for corpus checksums.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace physq
