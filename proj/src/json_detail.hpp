#pragma once

#include <json.hpp>

#include "tablekit/table.hpp"

namespace tablekit::detail {

inline nlohmann::json grid_json(const TableGrid& grid) {
    nlohmann::json cells = nlohmann::json::array();
    for (const CellSpec& c : grid.cells) {
        nlohmann::json j{{"r", c.row},
                         {"c", c.col},
                         {"rowspan", c.rowspan},
                         {"colspan", c.colspan},
                         {"empty", c.empty}};
        if (c.content) j["text"] = *c.content;
        cells.push_back(std::move(j));
    }
    return nlohmann::json{{"n_rows", grid.n_rows}, {"n_cols", grid.n_cols}, {"cells", cells}};
}

inline TableGrid grid_from(const nlohmann::json& j) {
    TableGrid grid;
    grid.n_rows = j.at("n_rows").get<int>();
    grid.n_cols = j.at("n_cols").get<int>();
    for (const auto& c : j.at("cells")) {
        CellSpec cell;
        cell.row = c.at("r").get<int>();
        cell.col = c.at("c").get<int>();
        cell.rowspan = c.at("rowspan").get<int>();
        cell.colspan = c.at("colspan").get<int>();
        cell.empty = c.at("empty").get<bool>();
        if (c.contains("text")) cell.content = c.at("text").get<std::string>();
        grid.cells.push_back(std::move(cell));
    }
    return grid;
}

inline nlohmann::json annotations_json(const CellAnnotations& ann) {
    nlohmann::json boxes = nlohmann::json::array();
    for (const AnnotatedBox& b : ann.boxes) {
        nlohmann::json j{{"bbox", {b.bbox.x0, b.bbox.y0, b.bbox.x1, b.bbox.y1}},
                         {"text", b.text},
                         {"distractor", b.distractor}};
        j["target"] = b.target ? nlohmann::json(*b.target) : nlohmann::json(nullptr);
        boxes.push_back(std::move(j));
    }
    return nlohmann::json{{"boxes", boxes}};
}

inline CellAnnotations annotations_from(const nlohmann::json& j) {
    CellAnnotations ann;
    for (const auto& b : j.at("boxes")) {
        AnnotatedBox box;
        const auto& r = b.at("bbox");
        box.bbox = BBox(r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(),
                        r.at(3).get<double>());
        box.text = b.at("text").get<std::string>();
        box.distractor = b.at("distractor").get<bool>();
        if (!b.at("target").is_null()) box.target = b.at("target").get<int>();
        ann.boxes.push_back(std::move(box));
    }
    return ann;
}

}  // namespace tablekit::detail
