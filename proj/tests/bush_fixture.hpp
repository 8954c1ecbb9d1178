#pragma once

#include <string>
#include <vector>

#include "wikicite/cluster_bush.hpp"

// Fixed three-run bush used by the committed-SVG comparison. Values are
// exactly representable doubles so the render is identical everywhere.
namespace bushfixture {

inline std::vector<std::string> article_labels() {
    return {"Altair", "Bellatrix", "Castor", "Deneb"};
}

inline std::vector<wikicite::NmfModel> models() {
    using Eigen::MatrixXd;
    std::vector<wikicite::NmfModel> models(3);

    models[0].k = 1;
    models[0].W = MatrixXd(4, 1);
    models[0].W << 1.0, 0.5, 0.25, 0.75;
    models[0].H = MatrixXd::Ones(1, 3);

    models[1].k = 2;
    models[1].W = MatrixXd(4, 2);
    models[1].W << 1.0, 0.0,
                   0.5, 0.125,
                   0.0, 0.5,
                   0.25, 0.75;
    models[1].H = MatrixXd::Ones(2, 3);

    models[2].k = 3;
    models[2].W = MatrixXd(4, 3);
    models[2].W << 1.0, 0.0, 0.0,
                   0.25, 0.25, 0.0,
                   0.0, 0.625, 0.125,
                   0.0, 0.0, 1.0;
    models[2].H = MatrixXd::Ones(3, 3);

    return models;
}

inline wikicite::ClusterBush bush() {
    return wikicite::build_bush(models(), article_labels(), {});
}

}  // namespace bushfixture
