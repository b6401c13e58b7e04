import numpy as np
import pytest
import scipy.io.wavfile
import scipy.signal

from stepgan import audio
from stepgan.dataset import LabeledDataset


def write_wav(path, data, rate=16000):
    path.parent.mkdir(parents=True, exist_ok=True)
    scipy.io.wavfile.write(path, rate, data)
    return path


def sine(freq, rate, seconds, amp=0.5):
    t = np.arange(int(rate * seconds)) / rate
    return amp * np.sin(2 * np.pi * freq * t)


def footstep_like(rng, rate=16000, n=6000, onset=1500, f0=900.0, decay=30.0):
    """Noise burst with exponential decay after a silent lead-in."""
    x = np.zeros(n)
    burst_len = n - onset
    t = np.arange(burst_len) / rate
    envelope = np.exp(-t * decay)
    tone = np.sin(2 * np.pi * f0 * t)
    noise = rng.normal(0, 0.3, burst_len)
    x[onset:] = envelope * (0.7 * tone + noise)
    peak = np.abs(x).max()
    return (0.9 * x / peak) if peak > 0 else x


def band_noise(rng, center, rate=16000, n=8192, width=300.0):
    """Band-limited noise around a center frequency, peak-normalized."""
    lo = max(center - width, 50.0)
    hi = min(center + width, rate / 2 - 50.0)
    sos = scipy.signal.butter(4, [lo, hi], btype="band", fs=rate, output="sos")
    x = scipy.signal.sosfilt(sos, rng.normal(0, 1.0, n))
    return 10 ** (-6 / 20) * x / np.abs(x).max()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def raw_tree(tmp_path, rng):
    """Raw dataset root: one folder per surface, 81 clips, mixed rates."""
    counts = dict(zip(audio.SURFACE_NAMES, (12, 12, 12, 12, 11, 11, 11)))
    rates = [16000, 32000, 48000]
    root = tmp_path / "raw"
    for ci, (name, count) in enumerate(counts.items()):
        for k in range(count):
            rate = rates[(ci + k) % len(rates)]
            x = footstep_like(rng, rate=rate, n=int(rate * 0.45),
                              onset=int(rate * 0.07), f0=500.0 + 130.0 * ci)
            write_wav(root / name / f"{name}_{k:02d}.wav",
                      (x * 32767).astype(np.int16), rate)
    return root


def prepared_dataset(rng, clips_per_class=2, classes=audio.SURFACE_NAMES):
    """In-memory prepared dataset of synthetic footsteps."""
    clips = []
    for name in classes:
        label = audio.SurfaceClass.from_name(name)
        for _ in range(clips_per_class):
            x = footstep_like(rng, n=9000, onset=900, f0=400.0 + 150.0 * label.id)
            clip = audio.prepare_clip(audio.AudioClip(x, 16000))
            clips.append(clip.with_label(label))
    return LabeledDataset(clips).validate()


@pytest.fixture
def tiny_dataset(rng):
    return prepared_dataset(rng, clips_per_class=2)


FIXTURE_CENTERS = (400.0, 1200.0, 2400.0, 4000.0, 6000.0)


def separable_fixture(seed=99, per_class=50):
    """5 classes of band-limited noise at disjoint center frequencies."""
    gen = np.random.default_rng(seed)
    x, y = [], []
    for ci, center in enumerate(FIXTURE_CENTERS):
        for _ in range(per_class):
            x.append(band_noise(gen, center))
            y.append(ci)
    return np.stack(x), np.array(y)


@pytest.fixture(scope="session")
def fixture_data():
    return separable_fixture()


@pytest.fixture(scope="session")
def fixture_classifier(fixture_data):
    """Classifier trained on the separable fixture; (trained, wall seconds)."""
    import time

    from stepgan.classifier import ClassifierConfig, train_eval_classifier

    x, y = fixture_data
    start = time.monotonic()
    trained = train_eval_classifier(x, y, ClassifierConfig(epochs=20, seed=0))
    return trained, time.monotonic() - start
