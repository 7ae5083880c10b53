use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};
use crate::nn::dense::DenseLayer;
use crate::nn::keygen::KeyGenStrategy;
use crate::nn::local::LocalAttention;
use crate::nn::model::{FusionConfig, FusionModel};
use crate::tensor::Tensor;

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"FCKP";
pub const CHECKPOINT_VERSION: u32 = 1;

fn format_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Format {
        path: path.display().to_string(),
        msg: msg.into(),
    }
}

/// Writes a model checkpoint.
///
/// Layout: magic `FCKP`, version u32, dim u32, n_heads u32, strategy code u8,
/// key-generator layer count u8, tensor count u32, then each tensor as a
/// length-prefixed name, ndim u8, dims u32, and f64 data. Everything is
/// little-endian; writes are byte-deterministic for identical models.
pub fn save_checkpoint(path: &Path, model: &FusionModel) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    let cfg = model.config();
    w.write_all(CHECKPOINT_MAGIC).map_err(io)?;
    w.write_u32::<LittleEndian>(CHECKPOINT_VERSION).map_err(io)?;
    w.write_u32::<LittleEndian>(cfg.dim as u32).map_err(io)?;
    w.write_u32::<LittleEndian>(cfg.n_heads as u32).map_err(io)?;
    w.write_u8(cfg.strategy.code()).map_err(io)?;
    w.write_u8(cfg.strategy.layer_count() as u8).map_err(io)?;
    let names = model.param_names();
    let params = model.params();
    w.write_u32::<LittleEndian>(names.len() as u32).map_err(io)?;
    for (name, tensor) in names.iter().zip(params) {
        w.write_u16::<LittleEndian>(name.len() as u16).map_err(io)?;
        w.write_all(name.as_bytes()).map_err(io)?;
        w.write_u8(tensor.ndim() as u8).map_err(io)?;
        for &d in tensor.shape() {
            w.write_u32::<LittleEndian>(d as u32).map_err(io)?;
        }
        for &v in tensor.data() {
            w.write_f64::<LittleEndian>(v).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

fn read_tensor(r: &mut impl Read, path: &Path) -> Result<(String, Tensor)> {
    let io = |e| Error::io(path, e);
    let name_len = r.read_u16::<LittleEndian>().map_err(io)? as usize;
    let mut name_buf = vec![0u8; name_len];
    r.read_exact(&mut name_buf).map_err(io)?;
    let name = String::from_utf8(name_buf)
        .map_err(|e| format_err(path, format!("invalid tensor name: {e}")))?;
    let ndim = r.read_u8().map_err(io)? as usize;
    if ndim == 0 || ndim > 2 {
        return Err(format_err(path, format!("tensor {name} has {ndim} dims")));
    }
    let mut shape = Vec::with_capacity(ndim);
    for _ in 0..ndim {
        shape.push(r.read_u32::<LittleEndian>().map_err(io)? as usize);
    }
    let len: usize = shape.iter().product();
    let mut data = vec![0f64; len];
    r.read_f64_into::<LittleEndian>(&mut data).map_err(io)?;
    let tensor = Tensor::from_vec(&shape, data)
        .map_err(|e| format_err(path, format!("tensor {name}: {e}")))?;
    Ok((name, tensor))
}

fn take_dense(
    tensors: &mut std::collections::VecDeque<(String, Tensor)>,
    prefix: &str,
    out_dim: usize,
    in_dim: usize,
    path: &Path,
) -> Result<DenseLayer> {
    let (wname, weight) = tensors
        .pop_front()
        .ok_or_else(|| format_err(path, format!("missing {prefix}.weight")))?;
    if wname != format!("{prefix}.weight") {
        return Err(format_err(path, format!("expected {prefix}.weight, found {wname}")));
    }
    if weight.shape() != [out_dim, in_dim] {
        return Err(format_err(
            path,
            format!("{wname} has shape {:?}, expected [{out_dim}, {in_dim}]", weight.shape()),
        ));
    }
    let (bname, bias) = tensors
        .pop_front()
        .ok_or_else(|| format_err(path, format!("missing {prefix}.bias")))?;
    if bname != format!("{prefix}.bias") {
        return Err(format_err(path, format!("expected {prefix}.bias, found {bname}")));
    }
    if bias.shape() != [out_dim] {
        return Err(format_err(
            path,
            format!("{bname} has shape {:?}, expected [{out_dim}]", bias.shape()),
        ));
    }
    Ok(DenseLayer { weight, bias })
}

/// Reads a checkpoint back into a model, enforcing the header invariants:
/// known strategy code, the strategy's exact layer count, and canonical
/// parameter names and shapes.
pub fn load_checkpoint(path: &Path) -> Result<FusionModel> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let io = |e| Error::io(path, e);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(format_err(path, "not a checkpoint file (bad magic)"));
    }
    let version = r.read_u32::<LittleEndian>().map_err(io)?;
    if version != CHECKPOINT_VERSION {
        return Err(format_err(path, format!("unsupported version {version}")));
    }
    let dim = r.read_u32::<LittleEndian>().map_err(io)? as usize;
    let n_heads = r.read_u32::<LittleEndian>().map_err(io)? as usize;
    let strategy = KeyGenStrategy::from_code(r.read_u8().map_err(io)?)?;
    let layer_count = r.read_u8().map_err(io)? as usize;
    if layer_count != strategy.layer_count() {
        return Err(format_err(
            path,
            format!(
                "strategy {strategy} requires {} key-generator layers, header says {layer_count}",
                strategy.layer_count()
            ),
        ));
    }
    let tensor_count = r.read_u32::<LittleEndian>().map_err(io)? as usize;
    let mut tensors = std::collections::VecDeque::with_capacity(tensor_count);
    for _ in 0..tensor_count {
        tensors.push_back(read_tensor(&mut r, path)?);
    }

    let cfg = FusionConfig { dim, n_heads, strategy };
    let mut keygen_layers = Vec::with_capacity(layer_count);
    for (i, (out, inp)) in strategy.layer_dims(dim).into_iter().enumerate() {
        keygen_layers.push(take_dense(&mut tensors, &format!("keygen.{i}"), out, inp, path)?);
    }
    let q_proj = take_dense(&mut tensors, "q_proj", dim, dim, path)?;
    let k_proj = take_dense(&mut tensors, "k_proj", dim, dim, path)?;
    let v_proj = take_dense(&mut tensors, "v_proj", dim, dim, path)?;
    let out_proj = take_dense(&mut tensors, "out_proj", dim, dim, path)?;
    let (kname, kernel) = tensors
        .pop_front()
        .ok_or_else(|| format_err(path, "missing local.kernel"))?;
    if kname != "local.kernel" {
        return Err(format_err(path, format!("expected local.kernel, found {kname}")));
    }
    let local = LocalAttention::from_tensor(kernel)?;
    let cls_hidden = take_dense(&mut tensors, "classifier.hidden", dim, dim, path)?;
    let cls_out = take_dense(
        &mut tensors,
        "classifier.output",
        crate::label::NUM_CLASSES,
        dim,
        path,
    )?;
    if let Some((extra, _)) = tensors.pop_front() {
        return Err(format_err(path, format!("unexpected trailing tensor {extra}")));
    }
    FusionModel::from_parts(
        &cfg,
        keygen_layers,
        q_proj,
        k_proj,
        v_proj,
        out_proj,
        local,
        cls_hidden,
        cls_out,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(strategy: KeyGenStrategy) -> FusionModel {
        FusionModel::seeded(
            &FusionConfig {
                dim: 8,
                n_heads: 2,
                strategy,
            },
            42,
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_exact_for_every_strategy() {
        let dir = tempfile::tempdir().unwrap();
        for s in KeyGenStrategy::ALL {
            let path = dir.path().join(format!("{s}.ckpt"));
            let m = model(s);
            save_checkpoint(&path, &m).unwrap();
            let back = load_checkpoint(&path).unwrap();
            assert_eq!(back, m, "{s}");
        }
    }

    #[test]
    fn identical_models_write_identical_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.ckpt");
        let b = dir.path().join("b.ckpt");
        save_checkpoint(&a, &model(KeyGenStrategy::UpDownConcat)).unwrap();
        save_checkpoint(&b, &model(KeyGenStrategy::UpDownConcat)).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }

    #[test]
    fn corrupted_layer_count_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.ckpt");
        save_checkpoint(&path, &model(KeyGenStrategy::UpDownMean)).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        // Header: magic(4) version(4) dim(4) n_heads(4) strategy(1) count(1).
        assert_eq!(bytes[17], 2);
        bytes[17] = 3;
        std::fs::write(&path, &bytes).unwrap();
        let err = load_checkpoint(&path).unwrap_err();
        assert!(err.to_string().contains("layers"), "{err}");
    }

    #[test]
    fn unknown_strategy_code_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.ckpt");
        save_checkpoint(&path, &model(KeyGenStrategy::Mean)).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[16] = 9;
        std::fs::write(&path, &bytes).unwrap();
        assert!(load_checkpoint(&path).is_err());
    }

    #[test]
    fn bad_magic_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.ckpt");
        std::fs::write(&path, b"NOPE0000").unwrap();
        assert!(matches!(load_checkpoint(&path).unwrap_err(), Error::Format { .. }));
    }
}
