"""Few-shot relation network for EEG motor-imagery classification.

Subpackages:
    numcore  -- dense float64 tensors with reverse-mode autodiff and Adam
    dsp      -- Butterworth band-pass design and zero-phase band splitting
    data     -- trial storage, folds, episodic sampling, augmentation, synthesis
    model    -- embedding / attention / relation network and episode loss
    harness  -- episodic training loop and cross-subject evaluation protocols
"""

__version__ = "0.1.0"

VERSION_STRING = f"fewmi-{__version__}"
