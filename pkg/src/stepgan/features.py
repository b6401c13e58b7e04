"""Log-mel spectrogram front end shared by the classifier and diagnostics."""
from __future__ import annotations

import numpy as np

# 25 ms window / 10 ms hop at 16 kHz
WIN_LENGTH = 400
HOP_LENGTH = 160
N_FFT = 512
N_MELS = 64
LOG_EPS = 1e-8


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(
    n_mels: int = N_MELS,
    n_fft: int = N_FFT,
    sample_rate: int = 16000,
    fmin: float = 0.0,
    fmax: float | None = None,
) -> np.ndarray:
    """Triangular mel filterbank, shape (n_mels, n_fft // 2 + 1)."""
    fmax = fmax or sample_rate / 2.0
    mel_pts = np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2)
    hz_pts = mel_to_hz(mel_pts)
    bin_freqs = np.linspace(0.0, sample_rate / 2.0, n_fft // 2 + 1)
    bank = np.zeros((n_mels, len(bin_freqs)))
    for i in range(n_mels):
        lo, mid, hi = hz_pts[i], hz_pts[i + 1], hz_pts[i + 2]
        up = (bin_freqs - lo) / max(mid - lo, 1e-12)
        down = (hi - bin_freqs) / max(hi - mid, 1e-12)
        bank[i] = np.maximum(0.0, np.minimum(up, down))
    return bank


def frame_signal(x: np.ndarray, win_length: int = WIN_LENGTH, hop_length: int = HOP_LENGTH) -> np.ndarray:
    """Non-centered framing: (..., L) -> (..., n_frames, win_length)."""
    x = np.asarray(x, dtype=np.float64)
    n_frames = 1 + (x.shape[-1] - win_length) // hop_length
    if n_frames < 1:
        raise ValueError(f"signal shorter than one window ({x.shape[-1]} < {win_length})")
    idx = np.arange(win_length)[None, :] + hop_length * np.arange(n_frames)[:, None]
    return x[..., idx]


def log_mel_spectrogram(
    waveforms: np.ndarray,
    sample_rate: int = 16000,
    n_mels: int = N_MELS,
    win_length: int = WIN_LENGTH,
    hop_length: int = HOP_LENGTH,
    n_fft: int = N_FFT,
) -> np.ndarray:
    """Log power mel spectrogram, (batch, n_frames, n_mels). 1-D input gains a batch dim."""
    x = np.asarray(waveforms, dtype=np.float64)
    squeeze = x.ndim == 1
    if squeeze:
        x = x[None, :]
    frames = frame_signal(x, win_length, hop_length)
    window = np.hanning(win_length)
    spec = np.abs(np.fft.rfft(frames * window, n=n_fft, axis=-1)) ** 2
    bank = mel_filterbank(n_mels, n_fft, sample_rate)
    mel = spec @ bank.T
    out = np.log(mel + LOG_EPS)
    return out[0] if squeeze else out


def logmel_stats(waveforms: np.ndarray, sample_rate: int = 16000, n_mels: int = N_MELS) -> np.ndarray:
    """Per-clip mean and std of the log-mel bands: (batch, 2 * n_mels)."""
    mel = log_mel_spectrogram(waveforms, sample_rate, n_mels)
    if mel.ndim == 2:
        mel = mel[None]
    return np.concatenate([mel.mean(axis=1), mel.std(axis=1)], axis=1)
