"""Training objectives.

The generator minimizes a weighted sum of reconstruction error, a
bottom-row boundary term, and an adversarial term; the discriminator
minimizes its conditional loss minus the adversarial loss, pushing real
pairs toward 1 and generated pairs toward 0.  Component values reported
alongside each total are the weighted contributions that actually enter
it, so a zero weight reports a zero component.
"""

import torch
import torch.nn.functional as F


def _bce_real(d_out):
    # BCE against the real label; clamp-free, torch bounds the log itself
    return F.binary_cross_entropy(d_out, torch.ones_like(d_out))


def generator_loss(pred, truth, d_fake, lambda_rec, lambda_ibc):
    """Weighted MSE + bottom-row MSE + BCE(discriminator output, real).

    Row 0 is the Dirichlet solid row, so the boundary term pins the
    prediction to the prescribed temperatures there.  Returns
    (total, components) with detached scalar components keyed
    rec/ibc/gan.
    """
    if pred.shape != truth.shape:
        raise ValueError(f"shape mismatch {tuple(pred.shape)} vs "
                         f"{tuple(truth.shape)}")
    rec = lambda_rec * F.mse_loss(pred, truth)
    ibc = lambda_ibc * F.mse_loss(pred[..., 0, :], truth[..., 0, :])
    gan = _bce_real(d_fake)
    total = rec + ibc + gan
    components = {"rec": float(rec.detach()) if torch.is_tensor(rec) else float(rec),
                  "ibc": float(ibc.detach()) if torch.is_tensor(ibc) else float(ibc),
                  "gan": float(gan.detach())}
    return total, components


def discriminator_loss(d_real, d_fake):
    """L_D = -L_GAN + L_C; zero at the symmetric 0.5/0.5 start.

    L_GAN measures how real the fakes look, L_C how real the reals
    look.  Minimizing the difference drives d_fake down and d_real up.
    """
    l_gan = _bce_real(d_fake)
    l_c = _bce_real(d_real)
    total = -l_gan + l_c
    return total, {"gan": float(l_gan.detach()), "c": float(l_c.detach())}
