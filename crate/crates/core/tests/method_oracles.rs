use std::collections::BTreeSet;

use exekg_core::methods::metrics::{accuracy, mae, mape};
use exekg_core::methods::models::{fit_kmeans, fit_knn, fit_linear_regression};
use exekg_core::methods::plot::{render_plot, PlotData};
use exekg_core::methods::split::train_test_split;
use exekg_core::methods::stats::{grouped_frequency, median, percentile};
use exekg_core::methods::{CanvasState, Column, KnnMode, Matrix, Model, PlotKind};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn points(max_n: usize) -> impl Strategy<Value = (usize, Vec<Vec<f64>>)> {
    (1usize..=4).prop_flat_map(move |d| {
        let row = prop::collection::vec((-5i32..=5).prop_map(f64::from), d);
        (Just(d), prop::collection::vec(row, 1..=max_n))
    })
}

/// Plain sort of all training rows, then a strict-majority-or-earliest vote.
fn brute_force_vote(train: &[Vec<f64>], labels: &[String], k: usize, q: &[f64]) -> String {
    let mut all: Vec<(f64, usize)> = train
        .iter()
        .enumerate()
        .map(|(i, p)| (p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum(), i))
        .collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let nearest: Vec<&String> = all[..k].iter().map(|&(_, i)| &labels[i]).collect();
    let count = |l: &String| nearest.iter().filter(|x| **x == l).count();
    let best = nearest.iter().map(|l| count(l)).max().unwrap();
    (*nearest.iter().find(|l| count(l) == best).unwrap()).clone()
}

fn brute_force_mean(train: &[Vec<f64>], y: &[f64], k: usize, q: &[f64]) -> f64 {
    let mut all: Vec<(f64, usize)> = train
        .iter()
        .enumerate()
        .map(|(i, p)| (p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum(), i))
        .collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    all[..k].iter().map(|&(_, i)| y[i]).sum::<f64>() / k as f64
}

fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn svg_root(svg: &str) -> roxmltree::Document<'_> {
    roxmltree::Document::parse(svg).unwrap_or_else(|e| panic!("{e}\n{svg}"))
}

fn count(doc: &roxmltree::Document<'_>, tag: &str) -> usize {
    doc.descendants().filter(|n| n.has_tag_name(tag)).count()
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn knn_vote_matches_brute_force(
        (d, train) in points(50),
        queries in prop::collection::vec(prop::collection::vec((-6i32..=6).prop_map(f64::from), 4), 1..8),
        raw_labels in prop::collection::vec(0u8..3, 50),
        k in 1usize..8,
    ) {
        let n = train.len();
        prop_assume!(k <= n);
        let labels: Vec<String> = raw_labels[..n].iter().map(|l| format!("c{l}")).collect();
        let queries: Vec<Vec<f64>> = queries.into_iter().map(|q| q[..d].to_vec()).collect();
        let model = fit_knn(&Matrix::from_rows(&train).unwrap(), &Column::Categorical(labels.clone()), k as i64, KnnMode::Vote).unwrap();
        let Column::Categorical(got) = model.predict(&Matrix::from_rows(&queries).unwrap()).unwrap() else {
            panic!("vote keeps label type")
        };
        for (q, g) in queries.iter().zip(&got) {
            prop_assert_eq!(g, &brute_force_vote(&train, &labels, k, q));
        }
    }

    #[test]
    fn knn_mean_matches_brute_force(
        (d, train) in points(50),
        query in prop::collection::vec((-6i32..=6).prop_map(f64::from), 4),
        y in prop::collection::vec(-100.0f64..100.0, 50),
        k in 1usize..8,
    ) {
        let n = train.len();
        prop_assume!(k <= n);
        let y = &y[..n];
        let q = &query[..d];
        let model = fit_knn(&Matrix::from_rows(&train).unwrap(), &Column::Numeric(y.to_vec()), k as i64, KnnMode::Mean).unwrap();
        let got = model.predict(&Matrix::from_rows(&[q.to_vec()]).unwrap()).unwrap();
        let expected = brute_force_mean(&train, y, k, q);
        prop_assert!((got.as_numeric().unwrap()[0] - expected).abs() <= 1e-9 * (1.0 + expected.abs()));
    }

    #[test]
    fn simple_regression_matches_closed_form(
        xs in prop::collection::vec(-50i32..50, 2..40),
        slope in -20i32..20,
        intercept in -20i32..20,
    ) {
        let xs: Vec<f64> = xs.into_iter().map(f64::from).collect();
        prop_assume!(xs.iter().any(|x| *x != xs[0]));
        let ys: Vec<f64> = xs.iter().map(|x| f64::from(slope) * x + f64::from(intercept)).collect();
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let b = sxy / sxx;
        let a = my - b * mx;
        let m = fit_linear_regression(&Matrix::new(xs.len(), 1, xs.clone()).unwrap(), &ys).unwrap();
        let Model::LinearRegression { coefficients, intercept: got } = m else { panic!() };
        prop_assert!((coefficients[0] - b).abs() <= 1e-9, "{} vs {}", coefficients[0], b);
        prop_assert!((got - a).abs() <= 1e-9, "{} vs {}", got, a);
        prop_assert!((b - f64::from(slope)).abs() <= 1e-9);
    }

    #[test]
    fn multiple_regression_recovers_exact_coefficients(
        d in 1usize..=3,
        coefs in prop::collection::vec(-9i32..=9, 3),
        intercept in -9i32..=9,
        rows in prop::collection::vec(prop::collection::vec(-10i32..=10, 3), 8..30),
    ) {
        let x: Vec<Vec<f64>> = rows.iter().map(|r| r[..d].iter().map(|v| f64::from(*v)).collect()).collect();
        let beta: Vec<f64> = coefs[..d].iter().map(|c| f64::from(*c)).collect();
        // Gram matrix of the centred design; skip near-collinear draws.
        let n = x.len() as f64;
        let means: Vec<f64> = (0..d).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n).collect();
        let gram: Vec<Vec<f64>> = (0..d)
            .map(|a| (0..d).map(|b| x.iter().map(|r| (r[a] - means[a]) * (r[b] - means[b])).sum()).collect())
            .collect();
        prop_assume!(det(&gram) > 1.0);
        let y: Vec<f64> = x.iter().map(|r| f64::from(intercept) + r.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>()).collect();
        let m = fit_linear_regression(&Matrix::from_rows(&x).unwrap(), &y).unwrap();
        let Model::LinearRegression { coefficients, intercept: got } = m else { panic!() };
        for (c, b) in coefficients.iter().zip(&beta) {
            prop_assert!((c - b).abs() <= 1e-9, "{} vs {}", c, b);
        }
        prop_assert!((got - f64::from(intercept)).abs() <= 1e-9);
    }

    #[test]
    fn split_is_a_reproducible_partition(n in 2usize..80, ratio in 0.05f64..0.95, seed in any::<u64>()) {
        let features = Matrix::new(n, 1, (0..n).map(|i| i as f64).collect()).unwrap();
        let labels = Column::Numeric((0..n).map(|i| (i * 10) as f64).collect());
        let s = train_test_split(&features, &labels, ratio, seed).unwrap();
        let mut all: Vec<usize> = s.train_rows.iter().chain(&s.test_rows).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        prop_assert!(!s.train_rows.is_empty() && !s.test_rows.is_empty());
        let expected_train = ((ratio * n as f64).floor() as usize).clamp(1, n - 1);
        prop_assert_eq!(s.train_rows.len(), expected_train);
        for (pos, &row) in s.test_rows.iter().enumerate() {
            prop_assert_eq!(s.test_features.get(pos, 0), row as f64);
            prop_assert_eq!(s.test_labels.as_numeric().unwrap()[pos], (row * 10) as f64);
        }
        prop_assert_eq!(train_test_split(&features, &labels, ratio, seed).unwrap(), s);
    }

    #[test]
    fn kmeans_objective_never_increases(
        rows in prop::collection::vec(prop::collection::vec(-100.0f64..100.0, 2), 1..60),
        k in 1i64..6,
        seed in any::<u64>(),
    ) {
        prop_assume!(k as usize <= rows.len());
        let m = fit_kmeans(&Matrix::from_rows(&rows).unwrap(), k, seed).unwrap();
        let Model::KMeans { history, iterations, centroids } = m.clone() else { panic!() };
        prop_assert_eq!(history.len(), iterations);
        prop_assert_eq!(centroids.rows(), k as usize);
        for w in history.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9 * (1.0 + w[0]), "{:?}", history);
        }
        prop_assert_eq!(fit_kmeans(&Matrix::from_rows(&rows).unwrap(), k, seed).unwrap(), m);
    }

    #[test]
    fn plots_are_well_formed_and_stable(
        xs in prop::collection::vec(-1.0e6f64..1.0e6, 1..40),
        title in "[ -~]{0,20}",
    ) {
        let ys: Vec<f64> = xs.iter().map(|x| x * 0.5 - 3.0).collect();
        let grid = Matrix::new(xs.len(), 1, xs.clone()).unwrap();
        let cases = [
            (PlotKind::Scatter, PlotData::Xy(&xs, &ys)),
            (PlotKind::Line, PlotData::Xy(&xs, &ys)),
            (PlotKind::Boxplot, PlotData::Single(&xs)),
            (PlotKind::Heatmap, PlotData::Grid(&grid)),
        ];
        for (kind, data) in cases {
            let a = render_plot(kind, data, &title, &mut CanvasState::new("c", 1, 1).unwrap()).unwrap();
            let b = render_plot(kind, data, &title, &mut CanvasState::new("c", 1, 1).unwrap()).unwrap();
            prop_assert_eq!(&a.svg, &b.svg);
            let doc = svg_root(&a.svg);
            let root = doc.root_element();
            prop_assert!(root.has_tag_name("svg"));
            prop_assert_eq!(root.attribute("data-kind"), Some(kind.as_str()));
            let text = root.descendants().find(|n| n.has_tag_name("text")).and_then(|n| n.text()).unwrap_or("");
            prop_assert_eq!(text, title.as_str());
            match kind {
                PlotKind::Scatter => prop_assert_eq!(count(&doc, "circle"), xs.len()),
                PlotKind::Line => {
                    let pts = root.descendants().find(|n| n.has_tag_name("polyline")).unwrap().attribute("points").unwrap();
                    prop_assert_eq!(pts.split(' ').count(), xs.len());
                }
                PlotKind::Boxplot => prop_assert_eq!(count(&doc, "rect"), 1),
                PlotKind::Heatmap => prop_assert_eq!(count(&doc, "rect"), xs.len()),
            }
        }
    }
}

#[test]
fn mape_on_the_reference_pair_is_exact() {
    assert_eq!(mape(&[1.0, 5.0], &[2.0, 4.0]).unwrap(), 0.375);
    assert_eq!(mae(&[1.0, 5.0], &[2.0, 4.0]).unwrap(), 1.0);
}

#[test]
fn accuracy_counts_exact_matches() {
    let p = Column::Categorical(vec!["a".into(), "b".into(), "a".into(), "a".into()]);
    let a = Column::Categorical(vec!["a".into(), "a".into(), "a".into(), "b".into()]);
    assert_eq!(accuracy(&p, &a).unwrap(), 0.5);
}

#[test]
fn percentiles_interpolate() {
    let v = [4.0, 1.0, 3.0, 2.0];
    assert_eq!(median(&v).unwrap(), 2.5);
    assert_eq!(percentile(&v, 0.0).unwrap(), 1.0);
    assert_eq!(percentile(&v, 100.0).unwrap(), 4.0);
    assert!((percentile(&v, 25.0).unwrap() - 1.75).abs() < 1e-12);
}

#[test]
fn grouped_frequency_counts_everything() {
    let v: Vec<f64> = (0..100).map(|i| (i % 17) as f64).collect();
    let table = grouped_frequency(&v, 4).unwrap();
    let total: f64 = (0..4).map(|i| table.get(i, 1)).sum();
    assert_eq!(total, 100.0);
    assert_eq!(table.get(0, 0), 0.0);
}

#[test]
fn heatmap_grays_span_black_to_white() {
    let m = Matrix::new(2, 2, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
    let art = render_plot(PlotKind::Heatmap, PlotData::Grid(&m), "h", &mut CanvasState::new("c", 1, 1).unwrap()).unwrap();
    let fills: BTreeSet<String> = svg_root(&art.svg)
        .descendants()
        .filter_map(|n| n.attribute("fill").map(str::to_owned))
        .collect();
    assert!(fills.contains("rgb(0,0,0)") && fills.contains("rgb(255,255,255)"), "{fills:?}");
}
