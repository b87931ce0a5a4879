from django.db import models

from .materials import MaterialModel


class Material(models.Model):
    """
    A named ferromagnet preset. Exactly one coupling is stored: the exchange
    energy, λ itself, or a target critical temperature that fixes J_ex.
    """
    name = models.CharField(max_length=100, unique=True)
    spin = models.FloatField(default=1.5)
    lande_g = models.FloatField(default=2.0)
    neighbors = models.PositiveIntegerField(default=6)
    exchange_energy = models.FloatField(null=True, blank=True, help_text='J_ex in joule')
    mean_field_parameter = models.FloatField(null=True, blank=True, help_text='λ in T/(J/T)')
    target_critical_temperature = models.FloatField(null=True, blank=True, help_text='T_c in kelvin')
    lambda_prime_ratio = models.FloatField(default=0.0, help_text="λ'/λ with M in units of g·μ_B·S")
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['name']

    def __str__(self):
        return f"{self.name} (S={self.spin}, g={self.lande_g})"

    def to_model(self):
        if self.target_critical_temperature is not None:
            return MaterialModel.from_critical_temperature(
                self.target_critical_temperature,
                spin=self.spin,
                g=self.lande_g,
                z=self.neighbors,
                lambda_prime_ratio=self.lambda_prime_ratio,
            )
        model = MaterialModel(
            spin=self.spin,
            g=self.lande_g,
            z=self.neighbors,
            j_ex=self.exchange_energy,
            lam=self.mean_field_parameter,
        )
        return model.with_lambda_prime_ratio(self.lambda_prime_ratio)
