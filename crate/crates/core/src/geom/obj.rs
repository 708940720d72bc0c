//! Wavefront OBJ text parsing and writing (`v`/`f` records only).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::mesh::TriMesh;
use crate::math::Vec3;

/// Triangles with area below this are dropped as degenerate slivers.
pub const DEGENERATE_AREA: f64 = 1e-16;

#[derive(Clone, Debug, PartialEq)]
pub enum ObjError {
    /// Malformed record; carries the 1-based line number and a message.
    Parse { line: usize, message: String },
    /// Face references a vertex that does not exist.
    IndexOutOfRange { line: usize, index: isize },
    /// No usable geometry in the file.
    Empty,
}

impl core::fmt::Display for ObjError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ObjError::Parse { line, message } => write!(f, "line {line}: {message}"),
            ObjError::IndexOutOfRange { line, index } => {
                write!(f, "line {line}: face index {index} out of range")
            }
            ObjError::Empty => write!(f, "no vertices or faces found"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ObjError {}

/// Parse result: the mesh plus the number of degenerate triangles dropped.
#[derive(Clone, Debug)]
pub struct ObjParse {
    pub mesh: TriMesh,
    pub dropped_degenerate: usize,
}

/// Parse OBJ text. Polygonal faces are fan-triangulated; vertex order is
/// preserved from the file; indices are 1-based per the format.
pub fn parse_obj(text: &str) -> Result<ObjParse, ObjError> {
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut faces: Vec<Vec<usize>> = Vec::new();

    for (line_no, raw) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("v") => {
                let mut coords = [0.0f64; 3];
                for c in &mut coords {
                    let tok = fields.next().ok_or_else(|| ObjError::Parse {
                        line: line_no,
                        message: String::from("vertex needs 3 coordinates"),
                    })?;
                    *c = tok.parse::<f64>().map_err(|_| ObjError::Parse {
                        line: line_no,
                        message: format!("bad coordinate `{tok}`"),
                    })?;
                    if !c.is_finite() {
                        return Err(ObjError::Parse {
                            line: line_no,
                            message: format!("non-finite coordinate `{tok}`"),
                        });
                    }
                }
                vertices.push(Vec3::from_array(coords));
            }
            Some("f") => {
                let mut face = Vec::new();
                for tok in fields {
                    // `f v`, `f v/vt`, `f v/vt/vn`, `f v//vn` all start with
                    // the vertex index.
                    let head = tok.split('/').next().unwrap_or("");
                    let idx: isize = head.parse().map_err(|_| ObjError::Parse {
                        line: line_no,
                        message: format!("bad face index `{tok}`"),
                    })?;
                    let resolved = if idx > 0 {
                        (idx - 1) as usize
                    } else if idx < 0 {
                        // Negative indices are relative to the current count.
                        let from_end = (-idx) as usize;
                        if from_end > vertices.len() {
                            return Err(ObjError::IndexOutOfRange {
                                line: line_no,
                                index: idx,
                            });
                        }
                        vertices.len() - from_end
                    } else {
                        return Err(ObjError::IndexOutOfRange {
                            line: line_no,
                            index: idx,
                        });
                    };
                    if resolved >= vertices.len() {
                        return Err(ObjError::IndexOutOfRange {
                            line: line_no,
                            index: idx,
                        });
                    }
                    face.push(resolved);
                }
                if face.len() < 3 {
                    return Err(ObjError::Parse {
                        line: line_no,
                        message: String::from("face needs at least 3 vertices"),
                    });
                }
                faces.push(face);
            }
            // vn/vt/o/g/s/usemtl/mtllib and anything else are ignored.
            _ => {}
        }
    }

    if vertices.is_empty() {
        return Err(ObjError::Empty);
    }

    let mut triangles = Vec::new();
    let mut dropped = 0usize;
    for face in &faces {
        for k in 1..face.len() - 1 {
            let tri = [face[0], face[k], face[k + 1]];
            let a = vertices[tri[0]];
            let b = vertices[tri[1]];
            let c = vertices[tri[2]];
            if (b - a).cross(c - a).norm() * 0.5 <= DEGENERATE_AREA {
                dropped += 1;
            } else {
                triangles.push(tri);
            }
        }
    }

    Ok(ObjParse {
        mesh: TriMesh::new(vertices, triangles),
        dropped_degenerate: dropped,
    })
}

/// Serialize a mesh back to OBJ text (1-based indices).
pub fn write_obj(mesh: &TriMesh) -> String {
    let mut out = String::new();
    for v in &mesh.vertices {
        out.push_str(&format!("v {} {} {}\n", v.x, v.y, v.z));
    }
    for t in &mesh.triangles {
        out.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    out
}
