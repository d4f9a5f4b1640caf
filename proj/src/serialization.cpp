// Copyright 2026 The Orchard Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "orchard/serialization.hpp"

#include <fstream>
#include <sstream>

#include "orchard/errors.hpp"

namespace orchard {

using nlohmann::json;

json to_json(const PolygonSet& shape) {
  json polys = json::array();
  for (const Polygon& p : shape.polygons) {
    json pts = json::array();
    for (const Point2& v : p) pts.push_back({v.x, v.y});
    polys.push_back(std::move(pts));
  }
  return {{"polygons", std::move(polys)}};
}

PolygonSet polygon_set_from_json(const json& j) {
  PolygonSet shape;
  try {
    for (const json& poly : j.at("polygons")) {
      Polygon p;
      for (const json& v : poly) p.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
      if (p.size() < 3) throw InvalidArgument("polygon with fewer than 3 vertices");
      shape.polygons.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed polygon document: ") + e.what());
  }
  return shape;
}

json tiles_to_json(ImageId image, const std::vector<Tile>& tiles) {
  json arr = json::array();
  for (const Tile& t : tiles) {
    arr.push_back({{"id", t.id}, {"x", t.x}, {"y", t.y}, {"w", t.w}, {"h", t.h}});
  }
  return {{"image_id", image}, {"tiles", std::move(arr)}};
}

std::vector<Tile> tiles_from_json(const json& j) {
  std::vector<Tile> tiles;
  try {
    const ImageId image = j.at("image_id").get<ImageId>();
    for (const json& t : j.at("tiles")) {
      tiles.push_back(Tile{t.at("id").get<TileId>(), t.at("x").get<std::int64_t>(),
                           t.at("y").get<std::int64_t>(), t.at("w").get<std::int64_t>(),
                           t.at("h").get<std::int64_t>(), image});
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed tile document: ") + e.what());
  }
  return tiles;
}

json detections_to_json(ImageId image, const std::vector<Detection>& dets) {
  json arr = json::array();
  for (const Detection& d : dets) {
    arr.push_back({{"x", d.box().x()},
                   {"y", d.box().y()},
                   {"w", d.box().w()},
                   {"h", d.box().h()},
                   {"score", d.score()}});
  }
  return {{"image_id", image}, {"detections", std::move(arr)}};
}

ImageId image_id_of(const json& j) {
  try {
    return j.at("image_id").get<ImageId>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("document lacks image_id: ") + e.what());
  }
}

std::vector<Detection> detections_from_json(const json& j) {
  std::vector<Detection> out;
  const ImageId image = image_id_of(j);
  try {
    for (const json& d : j.at("detections")) {
      const double score = d.contains("score") ? d.at("score").get<double>() : 1.0;
      out.emplace_back(BoundingBox(d.at("x").get<double>(), d.at("y").get<double>(),
                                   d.at("w").get<double>(), d.at("h").get<double>()),
                       score, ImageGlobal{image});
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed detection document: ") + e.what());
  }
  return out;
}

json pseudo_labels_to_json(ImageId image, const std::vector<BoundingBox>& boxes) {
  json arr = json::array();
  for (const BoundingBox& b : boxes) {
    arr.push_back({{"x", b.x()}, {"y", b.y()}, {"w", b.w()}, {"h", b.h()}});
  }
  return {{"image_id", image}, {"detections", std::move(arr)}};
}

json to_json(const EvalResult& result) {
  json per = json::array();
  for (const PerIouResult& p : result.per_iou) {
    per.push_back({{"iou", p.threshold},
                   {"ap", p.ap},
                   {"recall", p.recall},
                   {"final_precision", p.final_precision}});
  }
  return {{"ap", result.ap}, {"ar", result.ar}, {"per_iou", std::move(per)}};
}

json to_json(const BinCurve& curve) {
  json bins = json::array();
  for (const Bin& b : curve.bins) {
    bins.push_back({{"range_lo", b.lo}, {"range_hi", b.hi}, {"count", b.count()}, {"ar", b.ar}});
  }
  return {{"property", curve.property}, {"bins", std::move(bins)}};
}

std::string to_csv(const BinCurve& curve) {
  std::ostringstream os;
  os.precision(10);
  os << "range_lo,range_hi,count,ar\n";
  for (const Bin& b : curve.bins) {
    os << b.lo << "," << b.hi << "," << b.count() << "," << b.ar << "\n";
  }
  return os.str();
}

json to_json(const TrainSchedule& s) {
  return {{"total_steps", s.total_steps},
          {"lr0", s.lr0},
          {"lr_drops", s.lr_drops},
          {"lr_drop_factor", s.lr_drop_factor},
          {"ratio0", s.ratio0},
          {"ratio_decay_span", s.ratio_decay_span},
          {"batch_size", s.batch_size},
          {"ema_decay", s.ema_decay},
          {"momentum", s.momentum},
          {"weight_decay", s.weight_decay}};
}

TrainSchedule schedule_from_json(const json& j) {
  TrainSchedule s;
  try {
    s.total_steps = j.value("total_steps", s.total_steps);
    s.lr0 = j.value("lr0", s.lr0);
    if (j.contains("lr_drops")) s.lr_drops = j.at("lr_drops").get<std::vector<std::int64_t>>();
    s.lr_drop_factor = j.value("lr_drop_factor", s.lr_drop_factor);
    s.ratio0 = j.value("ratio0", s.ratio0);
    s.ratio_decay_span = j.value("ratio_decay_span", s.ratio_decay_span);
    s.batch_size = j.value("batch_size", s.batch_size);
    s.ema_decay = j.value("ema_decay", s.ema_decay);
    s.momentum = j.value("momentum", s.momentum);
    s.weight_decay = j.value("weight_decay", s.weight_decay);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed schedule: ") + e.what());
  }
  s.validate();
  return s;
}

json to_json(const BatchManifest& batch) {
  return {{"labeled", batch.labeled}, {"unlabeled", batch.unlabeled}};
}

json to_json(const TileCorpus& corpus) {
  json tiles = json::array();
  for (const CorpusEntry& e : corpus.tiles) {
    tiles.push_back({{"image_id", e.image},
                     {"id", e.tile.id},
                     {"x", e.tile.x},
                     {"y", e.tile.y},
                     {"w", e.tile.w},
                     {"h", e.tile.h}});
  }
  return {{"tiles", std::move(tiles)},
          {"missing_maps", corpus.missing_maps},
          {"warnings", corpus.warnings()}};
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw IoError("invalid JSON in " + path.string());
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const json& j, int indent) {
  write_text(path, j.dump(indent) + "\n");
}

}  // namespace orchard
