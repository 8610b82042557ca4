//! Surface-characterization procedures: strip-averaged line profiles and
//! RMS roughness of height maps, elevation-onset fitting versus fluence,
//! wrinkling amplitude of line traces, and dark-contrast segmentation of
//! cross-section micrographs by depth.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::math;

/// Scanned topography: heights [nm] on a square-pixel grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightMap {
    pub heights: Array2<f64>,
    /// Pixel pitch along both axes [nm].
    pub pixel_size: f64,
}

impl HeightMap {
    pub fn validate(&self) -> Result<()> {
        if self.heights.nrows() == 0 || self.heights.ncols() == 0 {
            return Err(Error::domain("height map must be non-empty"));
        }
        if !(self.pixel_size > 0.0) || !self.pixel_size.is_finite() {
            return Err(Error::domain(format!(
                "pixel size must be > 0 nm, got {}",
                self.pixel_size
            )));
        }
        if self.heights.iter().any(|h| !h.is_finite()) {
            return Err(Error::domain("height map contains non-finite values"));
        }
        Ok(())
    }
}

/// Cross-section micrograph: intensities (arbitrary units) whose rows map
/// to sample depth. Pixels are square; the row pitch of `depth_axis` also
/// sets the lateral pixel size.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    pub intensities: Array2<f64>,
    /// Depth of each row [nm]; strictly monotone.
    pub depth_axis: Vec<f64>,
}

impl GrayImage {
    /// Builds the depth axis affinely: row i sits at
    /// `depth_at_first_row + i · nm_per_row`.
    pub fn with_affine_depth(
        intensities: Array2<f64>,
        depth_at_first_row: f64,
        nm_per_row: f64,
    ) -> Result<GrayImage> {
        if nm_per_row == 0.0 || !nm_per_row.is_finite() || !depth_at_first_row.is_finite() {
            return Err(Error::domain(format!(
                "depth axis needs a finite nonzero row pitch, got {nm_per_row}"
            )));
        }
        let depth_axis = (0..intensities.nrows())
            .map(|i| depth_at_first_row + i as f64 * nm_per_row)
            .collect();
        let img = GrayImage { intensities, depth_axis };
        img.validate()?;
        Ok(img)
    }

    pub fn validate(&self) -> Result<()> {
        let rows = self.intensities.nrows();
        if rows == 0 || self.intensities.ncols() == 0 {
            return Err(Error::domain("image must be non-empty"));
        }
        if self.depth_axis.len() != rows {
            return Err(Error::domain(format!(
                "depth axis length {} does not match {} rows",
                self.depth_axis.len(),
                rows
            )));
        }
        if self.intensities.iter().any(|v| !v.is_finite())
            || self.depth_axis.iter().any(|v| !v.is_finite())
        {
            return Err(Error::domain("image contains non-finite values"));
        }
        if rows >= 2 {
            let increasing = self.depth_axis[1] > self.depth_axis[0];
            let monotone = self.depth_axis.windows(2).all(|w| {
                if increasing { w[1] > w[0] } else { w[1] < w[0] }
            });
            if !monotone {
                return Err(Error::domain("depth axis must be strictly monotone"));
            }
        }
        Ok(())
    }

    /// Mean absolute row pitch [nm]; the lateral pixel size by the
    /// square-pixel convention.
    pub fn row_pitch(&self) -> f64 {
        if self.depth_axis.len() < 2 {
            return 1.0;
        }
        let span = (self.depth_axis[self.depth_axis.len() - 1] - self.depth_axis[0]).abs();
        span / (self.depth_axis.len() - 1) as f64
    }
}

/// Direction a line profile runs in the image plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileAxis {
    /// Positions are column indices; the strip spans rows.
    Horizontal,
    /// Positions are row indices; the strip spans columns.
    Vertical,
}

/// Averages a centered strip of the map perpendicular to the profile
/// direction, returning `(position [nm], mean height [nm])` per pixel along
/// the profile.
pub fn strip_averaged_profile(
    map: &HeightMap,
    axis: ProfileAxis,
    strip_width_nm: f64,
) -> Result<Vec<(f64, f64)>> {
    map.validate()?;
    if !(strip_width_nm > 0.0) || !strip_width_nm.is_finite() {
        return Err(Error::domain(format!(
            "strip width must be > 0 nm, got {strip_width_nm}"
        )));
    }
    let strip_pixels = (strip_width_nm / map.pixel_size).round() as isize;
    if strip_pixels < 1 {
        return Err(Error::domain(format!(
            "strip width {strip_width_nm} nm is below one pixel ({} nm)",
            map.pixel_size
        )));
    }
    let k = strip_pixels as usize;
    let (rows, cols) = (map.heights.nrows(), map.heights.ncols());
    let across = match axis {
        ProfileAxis::Horizontal => rows,
        ProfileAxis::Vertical => cols,
    };
    if k > across {
        return Err(Error::domain(format!(
            "strip of {k} pixels exceeds the map extent of {across} pixels"
        )));
    }
    let start = (across - k) / 2;
    let along = match axis {
        ProfileAxis::Horizontal => cols,
        ProfileAxis::Vertical => rows,
    };
    let mut profile = Vec::with_capacity(along);
    for p in 0..along {
        let mut sum = 0.0;
        for s in start..start + k {
            sum += match axis {
                ProfileAxis::Horizontal => map.heights[(s, p)],
                ProfileAxis::Vertical => map.heights[(p, s)],
            };
        }
        profile.push((p as f64 * map.pixel_size, sum / k as f64));
    }
    Ok(profile)
}

/// Trend removal applied before an RMS evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detrend {
    /// Deviation about zero.
    None,
    /// Deviation about the mean (the usual roughness convention).
    Mean,
    /// Deviation about a least-squares line (profiles) or plane (regions).
    Linear,
}

/// RMS roughness of a line profile's heights [nm] after the chosen
/// detrend.
pub fn rms_roughness(heights: &[f64], detrend: Detrend) -> Result<f64> {
    if heights.len() < 2 {
        return Err(Error::domain(format!(
            "roughness needs >= 2 samples, got {}",
            heights.len()
        )));
    }
    if heights.iter().any(|h| !h.is_finite()) {
        return Err(Error::domain("heights must be finite"));
    }
    let n = heights.len() as f64;
    let residual_sq: f64 = match detrend {
        Detrend::None => heights.iter().map(|h| h * h).sum(),
        Detrend::Mean => {
            let mean = heights.iter().sum::<f64>() / n;
            heights.iter().map(|h| (h - mean) * (h - mean)).sum()
        }
        Detrend::Linear => {
            let pts: Vec<(f64, f64)> =
                heights.iter().enumerate().map(|(i, &h)| (i as f64, h)).collect();
            let (slope, intercept) = math::linear_fit(&pts)?;
            pts.iter()
                .map(|&(x, h)| {
                    let r = h - (slope * x + intercept);
                    r * r
                })
                .sum()
        }
    };
    Ok((residual_sq / n).sqrt())
}

/// RMS roughness of a full map region [nm]; `Linear` removes a
/// least-squares plane a + b·x + c·y.
pub fn rms_roughness_region(map: &HeightMap, detrend: Detrend) -> Result<f64> {
    map.validate()?;
    let (rows, cols) = (map.heights.nrows(), map.heights.ncols());
    let n = (rows * cols) as f64;
    if rows * cols < 2 {
        return Err(Error::domain("roughness needs >= 2 samples"));
    }
    let residual_sq = match detrend {
        Detrend::None => map.heights.iter().map(|h| h * h).sum::<f64>(),
        Detrend::Mean => {
            let mean = map.heights.sum() / n;
            map.heights.iter().map(|h| (h - mean) * (h - mean)).sum()
        }
        Detrend::Linear => {
            // Normal equations of h ~ a + b x + c y over the pixel grid.
            let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
            let (mut sh, mut sxh, mut syh) = (0.0, 0.0, 0.0);
            for ((r, c), &h) in map.heights.indexed_iter() {
                let (x, y) = (c as f64, r as f64);
                sx += x;
                sy += y;
                sxx += x * x;
                syy += y * y;
                sxy += x * y;
                sh += h;
                sxh += x * h;
                syh += y * h;
            }
            let a_mat = vec![n, sx, sy, sx, sxx, sxy, sy, sxy, syy];
            let rhs = vec![sh, sxh, syh];
            let sol = math::solve_dense_small(&a_mat, &rhs)
                .ok_or_else(|| Error::domain("degenerate plane fit (map too small)"))?;
            map.heights
                .indexed_iter()
                .map(|((r, c), &h)| {
                    let fitted = sol[0] + sol[1] * c as f64 + sol[2] * r as f64;
                    (h - fitted) * (h - fitted)
                })
                .sum()
        }
    };
    Ok((residual_sq / n).sqrt())
}

/// Result of [`elevation_onset_fit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnsetFit {
    /// Elevation growth per fluence [nm/(ions/nm²)].
    pub slope: f64,
    /// Fluence where the fitted line crosses zero elevation [ions/nm²].
    pub intercept_fluence: f64,
}

/// Default low-fluence exclusion for the onset fit [ions/nm²]: points
/// below the swelling onset carry no elevation signal.
pub const ONSET_EXCLUSION_DEFAULT: f64 = 250.0;

/// Least-squares line through `(fluence, elevation)` points at or above
/// `exclusion_below`, reporting the slope and the zero-elevation intercept
/// fluence −b/m.
pub fn elevation_onset_fit(
    points: &[(f64, f64)],
    exclusion_below: f64,
) -> Result<OnsetFit> {
    if !exclusion_below.is_finite() {
        return Err(Error::domain("exclusion fluence must be finite"));
    }
    let retained: Vec<(f64, f64)> = points
        .iter()
        .filter(|(phi, _)| *phi >= exclusion_below)
        .cloned()
        .collect();
    if retained.len() < 2 {
        return Err(Error::domain(format!(
            "onset fit needs >= 2 points at or above {exclusion_below} ions/nm2, got {}",
            retained.len()
        )));
    }
    let (slope, intercept) = math::linear_fit(&retained)?;
    if !(slope > 0.0) {
        return Err(Error::domain(format!(
            "elevation must grow with fluence; fitted slope {slope}"
        )));
    }
    Ok(OnsetFit { slope, intercept_fluence: -intercept / slope })
}

/// Peak-to-peak and RMS measures of a height trace about its mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WrinklingAmplitude {
    /// max − min of the heights [nm].
    pub range: f64,
    /// RMS of (h − mean h) [nm].
    pub rms: f64,
}

/// Wrinkling metrics of a line trace: local deviation from the mean
/// surface height.
pub fn wrinkling_amplitude(heights: &[f64]) -> Result<WrinklingAmplitude> {
    let rms = rms_roughness(heights, Detrend::Mean)?;
    let max = heights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = heights.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(WrinklingAmplitude { range: max - min, rms })
}

/// Neighborhood rule for connected components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

/// Labels connected `true` regions of a mask. Returns the label image
/// (0 = background; components numbered 1..=count in raster order of
/// their first pixel) and the component count.
pub fn label_components(mask: &Array2<bool>, connectivity: Connectivity) -> (Array2<u32>, usize) {
    let (rows, cols) = (mask.nrows(), mask.ncols());
    let mut labels = Array2::<u32>::zeros((rows, cols));
    // Union-find over provisional labels; parent[0] unused (background).
    let mut parent: Vec<u32> = vec![0];
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    for r in 0..rows {
        for c in 0..cols {
            if !mask[(r, c)] {
                continue;
            }
            // Already-labeled neighbors: left and up for 4-connectivity,
            // plus the upper diagonals for 8-connectivity.
            let mut neighbor_roots = [0u32; 4];
            let mut n_roots = 0;
            let push = |parent: &mut Vec<u32>, lab: u32, roots: &mut [u32; 4], n: &mut usize| {
                if lab != 0 {
                    roots[*n] = find(parent, lab);
                    *n += 1;
                }
            };
            if c > 0 {
                push(&mut parent, labels[(r, c - 1)], &mut neighbor_roots, &mut n_roots);
            }
            if r > 0 {
                push(&mut parent, labels[(r - 1, c)], &mut neighbor_roots, &mut n_roots);
                if connectivity == Connectivity::Eight {
                    if c > 0 {
                        push(&mut parent, labels[(r - 1, c - 1)], &mut neighbor_roots, &mut n_roots);
                    }
                    if c + 1 < cols {
                        push(&mut parent, labels[(r - 1, c + 1)], &mut neighbor_roots, &mut n_roots);
                    }
                }
            }
            if n_roots == 0 {
                let fresh = parent.len() as u32;
                parent.push(fresh);
                labels[(r, c)] = fresh;
            } else {
                let min_root = *neighbor_roots[..n_roots].iter().min().expect("nonempty");
                labels[(r, c)] = min_root;
                for &root in &neighbor_roots[..n_roots] {
                    parent[root as usize] = min_root;
                }
            }
        }
    }
    // Second pass: resolve to roots and renumber in raster order.
    let mut canonical: Vec<u32> = vec![0; parent.len()];
    let mut count = 0u32;
    for r in 0..rows {
        for c in 0..cols {
            let lab = labels[(r, c)];
            if lab == 0 {
                continue;
            }
            let root = find(&mut parent, lab);
            if canonical[root as usize] == 0 {
                count += 1;
                canonical[root as usize] = count;
            }
            labels[(r, c)] = canonical[root as usize];
        }
    }
    (labels, count as usize)
}

/// One depth row of the dark-contrast segmentation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthContrast {
    /// Depth of the row [nm].
    pub depth: f64,
    /// Masked fraction of the row's pixels [0, 1].
    pub area_fraction: f64,
    /// Mean full area of the distinct dark components touching the row
    /// [nm²]; 0 when the row has none.
    pub mean_region_size: f64,
}

/// Summed-area tables of values and squares for O(1) clamped-window sums.
struct LocalStats {
    sum: Array2<f64>,
    sum_sq: Array2<f64>,
}

impl LocalStats {
    fn new(img: &Array2<f64>) -> LocalStats {
        let (rows, cols) = (img.nrows(), img.ncols());
        let mut sum = Array2::<f64>::zeros((rows + 1, cols + 1));
        let mut sum_sq = Array2::<f64>::zeros((rows + 1, cols + 1));
        for r in 0..rows {
            for c in 0..cols {
                let v = img[(r, c)];
                sum[(r + 1, c + 1)] = v + sum[(r, c + 1)] + sum[(r + 1, c)] - sum[(r, c)];
                sum_sq[(r + 1, c + 1)] =
                    v * v + sum_sq[(r, c + 1)] + sum_sq[(r + 1, c)] - sum_sq[(r, c)];
            }
        }
        LocalStats { sum, sum_sq }
    }

    /// Mean and standard deviation over the window centered at (r, c) with
    /// half-width `radius`, clamped to the image.
    fn mean_std(&self, r: usize, c: usize, radius: usize, rows: usize, cols: usize) -> (f64, f64) {
        let r0 = r.saturating_sub(radius);
        let c0 = c.saturating_sub(radius);
        let r1 = (r + radius + 1).min(rows);
        let c1 = (c + radius + 1).min(cols);
        let count = ((r1 - r0) * (c1 - c0)) as f64;
        let s = self.sum[(r1, c1)] - self.sum[(r0, c1)] - self.sum[(r1, c0)] + self.sum[(r0, c0)];
        let s2 = self.sum_sq[(r1, c1)] - self.sum_sq[(r0, c1)] - self.sum_sq[(r1, c0)]
            + self.sum_sq[(r0, c0)];
        let mean = s / count;
        let var = (s2 / count - mean * mean).max(0.0);
        (mean, var.sqrt())
    }
}

/// Default deviation threshold for the dark mask, in local standard
/// deviations below the local mean.
pub const DARK_THRESHOLD_DEFAULT: f64 = 1.5;

/// Builds the dark mask: intensity strictly below
/// `local mean − threshold_k · local std` of the clamped
/// `background_window × background_window` neighborhood. The std-relative
/// rule makes the mask invariant under affine intensity rescaling.
pub fn dark_mask(
    image: &GrayImage,
    background_window: usize,
    threshold_k: f64,
) -> Result<Array2<bool>> {
    image.validate()?;
    if background_window < 3 || background_window % 2 == 0 {
        return Err(Error::domain(format!(
            "background window must be odd and >= 3, got {background_window}"
        )));
    }
    if !(threshold_k > 0.0) || !threshold_k.is_finite() {
        return Err(Error::domain(format!(
            "threshold must be > 0 standard deviations, got {threshold_k}"
        )));
    }
    let (rows, cols) = (image.intensities.nrows(), image.intensities.ncols());
    let stats = LocalStats::new(&image.intensities);
    let radius = background_window / 2;
    let mut mask = Array2::<bool>::from_elem((rows, cols), false);
    for r in 0..rows {
        for c in 0..cols {
            let (mean, std) = stats.mean_std(r, c, radius, rows, cols);
            mask[(r, c)] = image.intensities[(r, c)] < mean - threshold_k * std;
        }
    }
    Ok(mask)
}

/// Dark-contrast segmentation by depth: local background subtraction, a
/// std-relative dark mask, connected components, then per depth row the
/// masked area fraction and the mean full size of the components touching
/// that row.
pub fn dark_contrast_by_depth(
    image: &GrayImage,
    background_window: usize,
    threshold_k: f64,
    connectivity: Connectivity,
) -> Result<Vec<DepthContrast>> {
    let mask = dark_mask(image, background_window, threshold_k)?;
    let (labels, count) = label_components(&mask, connectivity);
    let mut component_area = vec![0usize; count + 1];
    for &lab in labels.iter() {
        if lab != 0 {
            component_area[lab as usize] += 1;
        }
    }
    let pitch = image.row_pitch();
    let pixel_area = pitch * pitch;
    let (rows, cols) = (labels.nrows(), labels.ncols());
    let mut out = Vec::with_capacity(rows);
    let mut seen = vec![0u32; count + 1];
    for r in 0..rows {
        let mut masked = 0usize;
        let mut region_total = 0usize;
        let mut regions = 0usize;
        let row_stamp = r as u32 + 1;
        for c in 0..cols {
            let lab = labels[(r, c)] as usize;
            if lab != 0 {
                masked += 1;
                if seen[lab] != row_stamp {
                    seen[lab] = row_stamp;
                    regions += 1;
                    region_total += component_area[lab];
                }
            }
        }
        let mean_region_size = if regions > 0 {
            region_total as f64 / regions as f64 * pixel_area
        } else {
            0.0
        };
        out.push(DepthContrast {
            depth: image.depth_axis[r],
            area_fraction: masked as f64 / cols as f64,
            mean_region_size,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::VecDeque;

    fn flat_map(rows: usize, cols: usize, h: f64, pixel: f64) -> HeightMap {
        HeightMap { heights: Array2::from_elem((rows, cols), h), pixel_size: pixel }
    }

    #[test]
    fn strip_profile_of_constant_and_separable_maps() {
        let map = flat_map(40, 60, 2.5, 10.0);
        let profile = strip_averaged_profile(&map, ProfileAxis::Horizontal, 150.0).unwrap();
        assert_eq!(profile.len(), 60);
        assert!(profile.iter().all(|&(_, h)| h == 2.5), "constant map, constant profile");
        assert_eq!(profile[3].0, 30.0, "positions advance by the pixel pitch");

        // Height depending only on the column survives row averaging exactly.
        let heights = Array2::from_shape_fn((40, 60), |(_, c)| (c as f64).sin());
        let map = HeightMap { heights, pixel_size: 10.0 };
        let profile = strip_averaged_profile(&map, ProfileAxis::Horizontal, 150.0).unwrap();
        for (j, &(_, h)) in profile.iter().enumerate() {
            assert!(
                (h - (j as f64).sin()).abs() < 1e-12,
                "column {j}: {h} vs {}",
                (j as f64).sin()
            );
        }
    }

    #[test]
    fn strip_profile_checkerboard_cancels_with_even_strip() {
        let heights =
            Array2::from_shape_fn((8, 12), |(r, c)| if (r + c) % 2 == 0 { 1.0 } else { -1.0 });
        let map = HeightMap { heights, pixel_size: 1.0 };
        let profile = strip_averaged_profile(&map, ProfileAxis::Horizontal, 4.0).unwrap();
        assert!(
            profile.iter().all(|&(_, h)| h == 0.0),
            "even strip over a checkerboard must cancel"
        );
    }

    #[test]
    fn strip_profile_bounds_and_width_checks() {
        let map = flat_map(10, 10, 0.0, 10.0);
        assert!(strip_averaged_profile(&map, ProfileAxis::Horizontal, 200.0).is_err());
        assert!(strip_averaged_profile(&map, ProfileAxis::Horizontal, 2.0).is_err());
        assert!(strip_averaged_profile(&map, ProfileAxis::Vertical, 100.0).is_ok());
    }

    #[test]
    fn rms_roughness_closed_forms() {
        assert_eq!(rms_roughness(&[3.0; 50], Detrend::Mean).unwrap(), 0.0, "flat is smooth");
        // Sine of amplitude a over whole periods: rms a/sqrt(2).
        let a = 0.8;
        let n = 1000;
        let sine: Vec<f64> = (0..n)
            .map(|k| a * (2.0 * std::f64::consts::PI * 4.0 * k as f64 / n as f64).sin())
            .collect();
        let rms = rms_roughness(&sine, Detrend::Mean).unwrap();
        let expected = a / std::f64::consts::SQRT_2;
        assert!((rms - expected).abs() < 1e-6 * a, "sine rms {rms} vs {expected}");
        // Tilted line vanishes under linear detrend.
        let tilted: Vec<f64> = (0..100).map(|k| 5.0 + 0.3 * k as f64).collect();
        let r = rms_roughness(&tilted, Detrend::Linear).unwrap();
        assert!(r < 1e-9, "line detrended to {r}");
        assert!(rms_roughness(&tilted, Detrend::Mean).unwrap() > 1.0, "mean removal keeps tilt");
        // Detrend::None measures about zero.
        assert_eq!(rms_roughness(&[2.0, 2.0, 2.0], Detrend::None).unwrap(), 2.0);
        assert!(rms_roughness(&[1.0], Detrend::Mean).is_err(), "one sample is not a profile");
    }

    #[test]
    fn rms_roughness_invariances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let base: Vec<f64> = (0..200).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r0 = rms_roughness(&base, Detrend::Mean).unwrap();
        let shifted: Vec<f64> = base.iter().map(|h| h + 17.0).collect();
        let r1 = rms_roughness(&shifted, Detrend::Mean).unwrap();
        assert!((r0 - r1).abs() < 1e-12, "translation invariance: {r0} vs {r1}");
        let scaled: Vec<f64> = base.iter().map(|h| h * 4.0).collect();
        let r4 = rms_roughness(&scaled, Detrend::Mean).unwrap();
        assert!((r4 - 4.0 * r0).abs() < 1e-12, "linear amplitude scaling: {r4} vs {}", 4.0 * r0);
    }

    #[test]
    fn region_roughness_removes_planes() {
        let heights = Array2::from_shape_fn((30, 40), |(r, c)| 2.0 + 0.1 * c as f64 - 0.05 * r as f64);
        let map = HeightMap { heights, pixel_size: 1.0 };
        let r = rms_roughness_region(&map, Detrend::Linear).unwrap();
        assert!(r < 1e-9, "plane must detrend to zero, got {r}");
        assert!(rms_roughness_region(&map, Detrend::Mean).unwrap() > 0.1);
        let flat = flat_map(5, 5, 1.25, 1.0);
        assert_eq!(rms_roughness_region(&flat, Detrend::Mean).unwrap(), 0.0);
        assert_eq!(rms_roughness_region(&flat, Detrend::None).unwrap(), 1.25);
    }

    #[test]
    fn onset_fit_recovers_exact_line_and_ignores_excluded_points() {
        // elevation = 0.014 (phi - 120) for phi >= 250.
        let pts: Vec<(f64, f64)> =
            [250.0, 500.0, 1000.0, 1500.0, 2000.0].iter().map(|&p| (p, 0.014 * (p - 120.0))).collect();
        let fit = elevation_onset_fit(&pts, 250.0).unwrap();
        assert!((fit.intercept_fluence - 120.0).abs() < 1e-6, "onset {}", fit.intercept_fluence);
        assert!((fit.slope - 0.014).abs() < 1e-9, "slope {}", fit.slope);
        // Low-fluence outliers sit below the exclusion and change nothing.
        let mut with_outliers = pts.clone();
        with_outliers.push((0.0, 3.0));
        with_outliers.push((100.0, -2.0));
        let fit2 = elevation_onset_fit(&with_outliers, 250.0).unwrap();
        assert_eq!(fit2, fit, "excluded points must not alter the fit");
        // Falling elevation is rejected; so is an empty retained set.
        let falling: Vec<(f64, f64)> = pts.iter().map(|&(p, e)| (p, -e)).collect();
        assert!(elevation_onset_fit(&falling, 250.0).is_err());
        assert!(elevation_onset_fit(&pts, 3000.0).is_err());
    }

    #[test]
    fn onset_fit_with_noise_stays_near_truth() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let pts: Vec<(f64, f64)> = (0..12)
            .map(|k| {
                let phi = 250.0 + 160.0 * k as f64;
                let clean = 0.014 * (phi - 120.0);
                (phi, clean * (1.0 + 0.05 * rng.gen_range(-1.0..1.0)))
            })
            .collect();
        let fit = elevation_onset_fit(&pts, 250.0).unwrap();
        assert!(
            (fit.intercept_fluence - 120.0).abs() < 12.0,
            "noisy onset {} should stay within 10 % of 120",
            fit.intercept_fluence
        );
    }

    #[test]
    fn wrinkling_amplitude_closed_forms() {
        let flat = [1.0; 20];
        let w = wrinkling_amplitude(&flat).unwrap();
        assert_eq!((w.range, w.rms), (0.0, 0.0));
        let a = 1.3;
        let n = 600;
        let sine: Vec<f64> = (0..n)
            .map(|k| a * (2.0 * std::f64::consts::PI * 3.0 * k as f64 / n as f64).sin())
            .collect();
        let w = wrinkling_amplitude(&sine).unwrap();
        assert!((w.range - 2.0 * a).abs() < 1e-3 * a, "sine range {}", w.range);
        assert!((w.rms - a / std::f64::consts::SQRT_2).abs() < 1e-6 * a, "sine rms {}", w.rms);
        // Two-level step: range 2a, rms exactly a.
        let step: Vec<f64> = (0..40).map(|k| if k < 20 { -a } else { a }).collect();
        let w = wrinkling_amplitude(&step).unwrap();
        assert!((w.range - 2.0 * a).abs() < 1e-12);
        assert!((w.rms - a).abs() < 1e-12, "step rms {}", w.rms);
    }

    /// Brute-force reference labeling: BFS flood fill in raster discovery
    /// order, which matches the canonical order of `label_components`.
    fn flood_fill_labels(mask: &Array2<bool>, connectivity: Connectivity) -> (Array2<u32>, usize) {
        let (rows, cols) = (mask.nrows(), mask.ncols());
        let mut labels = Array2::<u32>::zeros((rows, cols));
        let mut count = 0u32;
        for r in 0..rows {
            for c in 0..cols {
                if !mask[(r, c)] || labels[(r, c)] != 0 {
                    continue;
                }
                count += 1;
                let mut queue = VecDeque::new();
                labels[(r, c)] = count;
                queue.push_back((r, c));
                while let Some((qr, qc)) = queue.pop_front() {
                    let deltas: &[(isize, isize)] = match connectivity {
                        Connectivity::Four => &[(-1, 0), (1, 0), (0, -1), (0, 1)],
                        Connectivity::Eight => &[
                            (-1, -1),
                            (-1, 0),
                            (-1, 1),
                            (0, -1),
                            (0, 1),
                            (1, -1),
                            (1, 0),
                            (1, 1),
                        ],
                    };
                    for &(dr, dc) in deltas {
                        let nr = qr as isize + dr;
                        let nc = qc as isize + dc;
                        if nr < 0 || nc < 0 || nr >= rows as isize || nc >= cols as isize {
                            continue;
                        }
                        let (nr, nc) = (nr as usize, nc as usize);
                        if mask[(nr, nc)] && labels[(nr, nc)] == 0 {
                            labels[(nr, nc)] = count;
                            queue.push_back((nr, nc));
                        }
                    }
                }
            }
        }
        (labels, count as usize)
    }

    #[test]
    fn component_labeling_matches_flood_fill_on_random_masks() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..8 {
            let mask = Array2::from_shape_fn((64, 64), |_| rng.gen_bool(0.35));
            for connectivity in [Connectivity::Four, Connectivity::Eight] {
                let (fast, n_fast) = label_components(&mask, connectivity);
                let (brute, n_brute) = flood_fill_labels(&mask, connectivity);
                assert_eq!(n_fast, n_brute, "trial {trial} ({connectivity:?}): component count");
                assert_eq!(fast, brute, "trial {trial} ({connectivity:?}): exact label equality");
            }
        }
    }

    #[test]
    fn component_labeling_handles_u_shapes() {
        // A U revisits an earlier provisional label from the other arm; the
        // union-find must merge it into one component.
        let mut mask = Array2::from_elem((5, 5), false);
        for r in 0..4 {
            mask[(r, 0)] = true;
            mask[(r, 4)] = true;
        }
        for c in 0..5 {
            mask[(4, c)] = true;
        }
        let (labels, count) = label_components(&mask, Connectivity::Four);
        assert_eq!(count, 1, "a U is one region");
        assert!(labels.iter().all(|&l| l == 0 || l == 1));
    }

    fn uniform_image(rows: usize, cols: usize, value: f64) -> GrayImage {
        GrayImage::with_affine_depth(Array2::from_elem((rows, cols), value), 0.0, 10.0).unwrap()
    }

    #[test]
    fn uniform_image_has_no_dark_contrast() {
        let img = uniform_image(50, 80, 137.0);
        let rows = dark_contrast_by_depth(&img, 15, 1.5, Connectivity::Four).unwrap();
        assert_eq!(rows.len(), 50);
        assert!(rows.iter().all(|r| r.area_fraction == 0.0 && r.mean_region_size == 0.0));
        assert_eq!(rows[30].depth, 300.0, "row 30 at 10 nm per row");
    }

    #[test]
    fn rectangles_of_known_area_are_recovered() {
        // Background 100, three dark 5x8 rectangles at known rows; windows
        // much larger than the rectangles keep the local stats background-
        // dominated so the mask recovers the rectangles exactly.
        let mut img = Array2::from_elem((60, 100), 100.0);
        let spots = [(10usize, 10usize), (10, 50), (40, 70)];
        for &(r0, c0) in &spots {
            for r in r0..r0 + 5 {
                for c in c0..c0 + 8 {
                    img[(r, c)] = 10.0;
                }
            }
        }
        let image = GrayImage::with_affine_depth(img, 0.0, 10.0).unwrap();
        let report = dark_contrast_by_depth(&image, 21, 1.5, Connectivity::Four).unwrap();
        // Rows 10..15 hold two rectangles: 16 dark pixels of 100.
        for r in 10..15 {
            let frac = report[r].area_fraction;
            assert!(
                (frac - 0.16).abs() < 0.05 * 0.16 + 1e-12,
                "row {r}: fraction {frac} vs 0.16"
            );
            // Each rectangle is 40 px of (10 nm)^2 pixels = 4000 nm^2.
            let size = report[r].mean_region_size;
            assert!(
                (size - 4000.0).abs() < 0.05 * 4000.0,
                "row {r}: mean region {size} nm2 vs 4000"
            );
        }
        // Rows without rectangles stay clean.
        assert_eq!(report[30].area_fraction, 0.0);
    }

    #[test]
    fn dark_contrast_peak_row_maps_to_expected_depth() {
        // Triangular coverage peaking at row 30 = 300 nm depth.
        let mut img = Array2::from_elem((60, 120), 200.0);
        for (dr, half_width) in [(4i32, 1usize), (3, 3), (2, 5), (1, 7), (0, 9)] {
            for sign in [-1i32, 1] {
                let r = (30 + sign * dr) as usize;
                for c in 60 - half_width..60 + half_width {
                    img[(r, c)] = 20.0;
                }
                if dr == 0 {
                    break;
                }
            }
        }
        let image = GrayImage::with_affine_depth(img, 0.0, 10.0).unwrap();
        let report = dark_contrast_by_depth(&image, 31, 1.5, Connectivity::Four).unwrap();
        let peak = report
            .iter()
            .max_by(|a, b| a.area_fraction.partial_cmp(&b.area_fraction).unwrap())
            .unwrap();
        assert!(
            (peak.depth - 300.0).abs() <= 10.0,
            "contrast peak at {} nm, want 300 +- one row",
            peak.depth
        );
    }

    #[test]
    fn dark_mask_is_affine_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let base = Array2::from_shape_fn((40, 40), |_| rng.gen_range(0..256) as f64);
        let transformed = base.mapv(|v| 2.0 * v + 0.5);
        let img_a = GrayImage::with_affine_depth(base, 0.0, 5.0).unwrap();
        let img_b = GrayImage::with_affine_depth(transformed, 0.0, 5.0).unwrap();
        let mask_a = dark_mask(&img_a, 9, 1.5).unwrap();
        let mask_b = dark_mask(&img_b, 9, 1.5).unwrap();
        assert_eq!(mask_a, mask_b, "a I + b with a > 0 must not move the mask");
    }

    #[test]
    fn dark_contrast_rejects_bad_windows_and_axes() {
        let img = uniform_image(10, 10, 1.0);
        assert!(dark_contrast_by_depth(&img, 4, 1.5, Connectivity::Four).is_err(), "even window");
        assert!(dark_contrast_by_depth(&img, 1, 1.5, Connectivity::Four).is_err(), "tiny window");
        assert!(dark_contrast_by_depth(&img, 9, 0.0, Connectivity::Four).is_err(), "zero threshold");
        let bad_axis = GrayImage {
            intensities: Array2::from_elem((3, 3), 1.0),
            depth_axis: vec![0.0, 10.0, 10.0],
        };
        assert!(bad_axis.validate().is_err(), "non-monotone depth axis");
        assert!(GrayImage::with_affine_depth(Array2::from_elem((3, 3), 1.0), 0.0, 0.0).is_err());
    }
}
