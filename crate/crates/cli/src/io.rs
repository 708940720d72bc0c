//! File IO: OBJ meshes, composite piece directories, and pose JSON.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use diffwitness_core::geom::{parse_obj, primitives, CompositeShape, ConvexPiece, TriMesh};
use diffwitness_core::math::{Mat3, Vec3};
use diffwitness_core::se3::Pose;
use serde::{Deserialize, Serialize};

/// Load a single OBJ mesh; degenerate-triangle drops are warned to stderr.
pub fn load_obj(path: &Path) -> Result<TriMesh> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let parsed = parse_obj(&text).with_context(|| format!("parsing {}", path.display()))?;
    if parsed.dropped_degenerate > 0 {
        eprintln!(
            "warning: {}: dropped {} degenerate triangle(s)",
            path.display(),
            parsed.dropped_degenerate
        );
    }
    Ok(parsed.mesh)
}

/// Load a composite from a directory: `piece_000.obj … piece_NNN.obj` plus
/// `source.obj`. Each piece is hull-repaired on load.
pub fn load_composite_dir(dir: &Path) -> Result<CompositeShape> {
    let mut piece_paths: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("reading directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .map(|n| n.starts_with("piece_") && n.ends_with(".obj"))
                .unwrap_or(false)
        })
        .collect();
    piece_paths.sort();
    if piece_paths.is_empty() {
        bail!("no piece_*.obj files in {}", dir.display());
    }
    let mut pieces = Vec::with_capacity(piece_paths.len());
    for p in &piece_paths {
        let mesh = load_obj(p)?;
        let piece = ConvexPiece::from_mesh(&mesh)
            .with_context(|| format!("hull repair of {}", p.display()))?;
        pieces.push(piece);
    }
    let source_path = dir.join("source.obj");
    let source_mesh = if source_path.exists() {
        load_obj(&source_path)?
    } else {
        // Without a source mesh, the union of the piece hulls stands in.
        let meshes: Vec<TriMesh> = pieces.iter().map(|p| p.as_mesh()).collect();
        primitives::merge_meshes(&meshes)
    };
    Ok(CompositeShape::new(pieces, source_mesh))
}

/// Resolve a shape argument: bundled name, a single `.obj` file, or a
/// composite piece directory.
pub fn load_shape(spec: &str, target_diag: f64) -> Result<CompositeShape> {
    let path = Path::new(spec);
    if path.is_dir() {
        Ok(load_composite_dir(path)?)
    } else if path.extension().map(|e| e == "obj").unwrap_or(false) {
        let mesh = load_obj(path)?;
        Ok(primitives::convex_composite(mesh))
    } else {
        crate::shapes::bundled(spec, target_diag)
    }
}

/// JSON form of a pose: rotation as 9 row-major floats, translation as 3.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PoseJson {
    #[serde(rename = "R")]
    pub rotation: [f64; 9],
    pub t: [f64; 3],
}

impl From<&Pose> for PoseJson {
    fn from(pose: &Pose) -> Self {
        let m = &pose.rotation.m;
        PoseJson {
            rotation: [
                m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2],
            ],
            t: pose.translation.to_array(),
        }
    }
}

impl PoseJson {
    pub fn to_pose(&self) -> Result<Pose> {
        let r = self.rotation;
        let pose = Pose::new(
            Mat3 {
                m: [
                    [r[0], r[1], r[2]],
                    [r[3], r[4], r[5]],
                    [r[6], r[7], r[8]],
                ],
            },
            Vec3::from_array(self.t),
        );
        if !pose.is_valid(1e-6) {
            bail!("pose rotation is not orthonormal (defect {})", pose.rotation_defect());
        }
        Ok(pose)
    }
}

/// Parse a pose from inline JSON; `None` or empty means identity.
pub fn parse_pose_arg(arg: Option<&str>) -> Result<Pose> {
    match arg {
        None | Some("") => Ok(Pose::IDENTITY),
        Some(text) => {
            let json: PoseJson =
                serde_json::from_str(text).context("parsing pose JSON {\"R\": [...9], \"t\": [...3]}")?;
            json.to_pose()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use diffwitness_core::geom::write_obj;
    use diffwitness_core::random::{rng_from_seed, uniform_rotation};

    #[test]
    fn pose_json_roundtrip() {
        let mut rng = rng_from_seed(1);
        let pose = Pose::new(uniform_rotation(&mut rng), Vec3::new(0.1, -0.2, 0.3));
        let json = serde_json::to_string(&PoseJson::from(&pose)).unwrap();
        let back = parse_pose_arg(Some(&json)).unwrap();
        assert!(pose.matrix_distance(&back) < 1e-12);
    }

    #[test]
    fn invalid_rotation_is_rejected() {
        let json = r#"{"R": [2,0,0, 0,1,0, 0,0,1], "t": [0,0,0]}"#;
        assert!(parse_pose_arg(Some(json)).is_err());
    }

    #[test]
    fn composite_dir_roundtrip() {
        let dir = std::env::temp_dir().join(format!("dw_shape_{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let shape = primitives::l_shape();
        for (i, piece) in shape.pieces.iter().enumerate() {
            fs::write(
                dir.join(format!("piece_{i:03}.obj")),
                write_obj(&piece.as_mesh()),
            )
            .unwrap();
        }
        fs::write(dir.join("source.obj"), write_obj(&shape.source_mesh)).unwrap();

        let loaded = load_composite_dir(&dir).unwrap();
        assert_eq!(loaded.pieces.len(), 2);
        assert!((loaded.diag - shape.diag).abs() < 1e-9);
        fs::remove_dir_all(&dir).unwrap();
    }
}
