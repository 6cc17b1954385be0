//! ASCII PLY export and import for colored point clouds.
//!
//! One fixed layout: `element vertex N` with properties
//! `x y z red green blue` (float coordinates, uchar colors). Coordinates are
//! written at `f32` precision in shortest round-trip form, so writing and
//! re-reading a file reproduces it byte for byte.

use std::fs;
use std::path::Path;

use terrain_pointnet::{Error, Result};

const HEADER_PROPS: [&str; 6] = [
    "property float x",
    "property float y",
    "property float z",
    "property uchar red",
    "property uchar green",
    "property uchar blue",
];

/// Writes points with per-point RGB colors.
pub fn write_ply(path: &Path, points: &[([f64; 3], [u8; 3])]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::Empty("ply export"));
    }
    let mut out = String::from("ply\nformat ascii 1.0\n");
    out.push_str(&format!("element vertex {}\n", points.len()));
    for prop in HEADER_PROPS {
        out.push_str(prop);
        out.push('\n');
    }
    out.push_str("end_header\n");
    for (p, c) in points {
        out.push_str(&format!(
            "{} {} {} {} {} {}\n",
            p[0] as f32, p[1] as f32, p[2] as f32, c[0], c[1], c[2]
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidParam(format!("bad ply: {}", msg.into()))
}

#[cfg(test)]
fn expect_line(lines: &mut std::str::Lines, want: &str) -> Result<()> {
    match lines.next() {
        Some(got) if got == want => Ok(()),
        Some(got) => Err(bad(format!("expected {want:?}, found {got:?}"))),
        None => Err(bad("truncated header")),
    }
}

/// Reads a file in the exact layout `write_ply` produces.
#[cfg(test)]
pub fn read_ply(path: &Path) -> Result<Vec<([f32; 3], [u8; 3])>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    expect_line(&mut lines, "ply")?;
    expect_line(&mut lines, "format ascii 1.0")?;
    let count: usize = match lines.next() {
        Some(line) => match line.strip_prefix("element vertex ") {
            Some(n) => n.parse().map_err(|_| bad(format!("vertex count {n:?}")))?,
            None => return Err(bad(format!("expected element vertex, found {line:?}"))),
        },
        None => return Err(bad("truncated header")),
    };
    for prop in HEADER_PROPS {
        expect_line(&mut lines, prop)?;
    }
    expect_line(&mut lines, "end_header")?;

    let mut points = Vec::with_capacity(count);
    for line in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(bad(format!("vertex line with {} fields", fields.len())));
        }
        let coord = |i: usize| -> Result<f32> {
            fields[i].parse().map_err(|_| bad(format!("coordinate {:?}", fields[i])))
        };
        let channel = |i: usize| -> Result<u8> {
            fields[i].parse().map_err(|_| bad(format!("color {:?}", fields[i])))
        };
        points.push((
            [coord(0)?, coord(1)?, coord(2)?],
            [channel(3)?, channel(4)?, channel(5)?],
        ));
    }
    if points.len() != count {
        return Err(bad(format!("header promised {count} vertices, found {}", points.len())));
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<([f64; 3], [u8; 3])> {
        vec![
            ([0.5, -1.25, 3.0], [255, 0, 0]),
            ([0.1, 0.2, 0.3], [128, 128, 128]),
            ([-2.0, 0.0, 1.5e-3], [0, 200, 0]),
        ]
    }

    #[test]
    fn three_points_give_three_vertex_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cloud.ply");
        write_ply(&path, &sample()).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let body: Vec<&str> = text.lines().skip_while(|l| *l != "end_header").skip(1).collect();
        assert_eq!(body.len(), 3);
        assert!(text.contains("element vertex 3"));
    }

    #[test]
    fn round_trip_recovers_f32_coordinates_and_colors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cloud.ply");
        let points = sample();
        write_ply(&path, &points).unwrap();
        let back = read_ply(&path).unwrap();
        assert_eq!(back.len(), points.len());
        for ((p, c), (q, d)) in points.iter().zip(&back) {
            for k in 0..3 {
                assert_eq!(p[k] as f32, q[k]);
            }
            assert_eq!(c, d);
        }
    }

    #[test]
    fn rewrite_of_a_parsed_file_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let first = dir.path().join("a.ply");
        let second = dir.path().join("b.ply");
        write_ply(&first, &sample()).unwrap();
        let parsed: Vec<([f64; 3], [u8; 3])> = read_ply(&first)
            .unwrap()
            .into_iter()
            .map(|(p, c)| ([p[0] as f64, p[1] as f64, p[2] as f64], c))
            .collect();
        write_ply(&second, &parsed).unwrap();
        assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
    }

    #[test]
    fn empty_cloud_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(write_ply(&dir.path().join("x.ply"), &[]).is_err());
    }

    #[test]
    fn malformed_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.ply");

        fs::write(&path, "obj\n").unwrap();
        assert!(read_ply(&path).is_err());

        fs::write(
            &path,
            "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\n\
             property float z\nproperty uchar red\nproperty uchar green\nproperty uchar blue\n\
             end_header\n0 0 0 1 2 3\n",
        )
        .unwrap();
        assert!(read_ply(&path).is_err());

        fs::write(
            &path,
            "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\n\
             property float z\nproperty uchar red\nproperty uchar green\nproperty uchar blue\n\
             end_header\n0 0 0 1 2\n",
        )
        .unwrap();
        assert!(read_ply(&path).is_err());
    }
}
